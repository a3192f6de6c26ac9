#include "blochcav/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "blochcav/errors.hpp"

namespace blochcav {

namespace {

struct Cursor {
  int line = 0;
  int column = 1;
};

[[noreturn]] void fail(const Cursor& at, const std::string& what) {
  throw ValidationError("config line " + std::to_string(at.line) + ", column " +
                        std::to_string(at.column) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

double to_double(std::string_view tok, const Cursor& at) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    fail(at, "expected a number, got '" + std::string(tok) + "'");
  }
  return v;
}

int to_int(std::string_view tok, const Cursor& at) {
  int v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    fail(at, "expected an integer, got '" + std::string(tok) + "'");
  }
  return v;
}

std::vector<double> numbers(std::string_view value, const Cursor& at) {
  std::vector<double> out;
  for (auto tok : split_ws(value)) out.push_back(to_double(tok, at));
  return out;
}

Vec3 vec3(std::string_view value, const Cursor& at) {
  const auto v = numbers(value, at);
  if (v.size() != 3) fail(at, "expected three numbers");
  return Vec3(v[0], v[1], v[2]);
}

double scalar(std::string_view value, const Cursor& at) {
  const auto v = numbers(value, at);
  if (v.size() != 1) fail(at, "expected one number");
  return v[0];
}

bool boolean(std::string_view value, const Cursor& at) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  fail(at, "expected true or false");
}

std::vector<KPath::Node> kpath_nodes(std::string_view value, const Cursor& at) {
  std::vector<KPath::Node> nodes;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t end = std::min(value.find(';', start), value.size());
    const auto toks = split_ws(value.substr(start, end - start));
    if (toks.size() != 4) fail(at, "k-path node must be '<label> <f1> <f2> <f3>'");
    nodes.push_back({std::string(toks[0]),
                     Vec3(to_double(toks[1], at), to_double(toks[2], at), to_double(toks[3], at))});
    start = end + 1;
  }
  return nodes;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  bool have_ell[3] = {false, false, false};
  bool have_a = false, have_nodes = false;
  std::string section;
  std::set<std::string> seen;

  auto resolve = [&](std::string_view v) {
    std::filesystem::path p{std::string(v)};
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };

  using Handler = std::function<void(std::string_view, const Cursor&)>;
  const std::map<std::string, Handler> handlers = {
      {"lattice.ell1", [&](auto v, auto& at) { cfg.ell[0] = vec3(v, at); have_ell[0] = true; }},
      {"lattice.ell2", [&](auto v, auto& at) { cfg.ell[1] = vec3(v, at); have_ell[1] = true; }},
      {"lattice.ell3", [&](auto v, auto& at) { cfg.ell[2] = vec3(v, at); have_ell[2] = true; }},
      {"cavity.shape",
       [&](auto v, auto& at) {
         if (v == "sphere") cfg.cavity.shape = CavityShape::Sphere;
         else if (v == "ellipsoid") cfg.cavity.shape = CavityShape::Ellipsoid;
         else if (v == "box") cfg.cavity.shape = CavityShape::Box;
         else if (v == "mesh") cfg.cavity.shape = CavityShape::Mesh;
         else fail(at, "unknown cavity shape '" + std::string(v) + "'");
       }},
      {"cavity.radius", [&](auto v, auto& at) { cfg.cavity.radius = scalar(v, at); }},
      {"cavity.semi_axes", [&](auto v, auto& at) { cfg.cavity.semi_axes = vec3(v, at); }},
      {"cavity.size", [&](auto v, auto& at) { cfg.cavity.box_size = vec3(v, at); }},
      {"cavity.mesh", [&](auto v, auto&) { cfg.cavity.mesh_path = resolve(v); }},
      {"cavity.refinement", [&](auto v, auto& at) { cfg.cavity.refinement = to_int(v, at); }},
      {"cavity.levels", [&](auto v, auto& at) { cfg.cavity.levels = to_int(v, at); }},
      {"cavity.extrapolate", [&](auto v, auto& at) { cfg.cavity.extrapolate = boolean(v, at); }},
      {"cavity.q", [&](auto v, auto& at) { cfg.cavity.q_override = scalar(v, at); }},
      {"medium.a", [&](auto v, auto& at) { cfg.a = scalar(v, at); have_a = true; }},
      {"medium.c", [&](auto v, auto& at) { cfg.c = scalar(v, at); }},
      {"kpath.nodes", [&](auto v, auto& at) { cfg.kpath.nodes = kpath_nodes(v, at); have_nodes = true; }},
      {"kpath.samples_per_segment",
       [&](auto v, auto& at) { cfg.kpath.samples_per_segment = to_int(v, at); }},
      {"solver.exceptional_tol", [&](auto v, auto& at) { cfg.exceptional_tol = scalar(v, at); }},
      {"verify.a_values", [&](auto v, auto& at) { cfg.verify_a_values = numbers(v, at); }},
      {"output.bands", [&](auto v, auto&) { cfg.bands_output = resolve(v); }},
      {"output.summary", [&](auto v, auto&) { cfg.summary_output = resolve(v); }},
      {"output.field", [&](auto v, auto&) { cfg.field_output = resolve(v); }},
      {"output.verify", [&](auto v, auto&) { cfg.verify_output = resolve(v); }},
  };

  Cursor at;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++at.line;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
      if (eol == text.size()) break;
      continue;
    }
    at.column = static_cast<int>(first) + 1;
    const std::string_view line = trim(raw);

    if (line.front() == '[') {
      if (line.back() != ']') fail(at, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) fail(at, "empty section name");
      continue;
    }
    const auto eq = raw.find('=');
    if (eq == std::string_view::npos) fail(at, "expected 'key = value'");
    const std::string key(trim(raw.substr(0, eq)));
    if (section.empty()) fail(at, "key '" + key + "' outside any section");
    const std::string full = section + "." + key;
    const auto it = handlers.find(full);
    if (it == handlers.end()) fail(at, "unknown key '" + full + "'");
    if (!seen.insert(full).second) fail(at, "duplicate key '" + full + "'");
    Cursor vat = at;
    const std::string_view after = raw.substr(eq + 1);
    const auto lead = after.find_first_not_of(" \t");
    vat.column = static_cast<int>(eq + 2 + (lead == std::string_view::npos ? 0 : lead));
    const std::string_view value = trim(after);
    if (value.empty()) fail(vat, "missing value for '" + full + "'");
    it->second(value, vat);
    if (eol == text.size()) break;
  }

  Cursor end{at.line, 1};
  for (int i = 0; i < 3; ++i) {
    if (!have_ell[i]) fail(end, "missing lattice.ell" + std::to_string(i + 1));
  }
  if (!have_a) fail(end, "missing medium.a");
  if (!(cfg.a >= 0)) fail(end, "medium.a must be >= 0");
  if (!(cfg.c > 0)) fail(end, "medium.c must be positive");
  if (!have_nodes) fail(end, "missing kpath.nodes");
  if (cfg.kpath.nodes.size() < 2) fail(end, "k-path needs at least two nodes");
  if (cfg.kpath.samples_per_segment < 1) fail(end, "kpath.samples_per_segment must be >= 1");
  if (!(cfg.exceptional_tol > 0)) fail(end, "solver.exceptional_tol must be positive");
  if (cfg.cavity.shape == CavityShape::Mesh && !cfg.cavity.q_override &&
      cfg.cavity.mesh_path.empty()) {
    fail(end, "cavity.shape = mesh requires cavity.mesh");
  }
  if (!cfg.cavity.mesh_path.empty() && !std::filesystem::exists(cfg.cavity.mesh_path)) {
    fail(end, "mesh file '" + cfg.cavity.mesh_path.string() + "' does not exist");
  }
  if (cfg.cavity.q_override && !(*cfg.cavity.q_override >= 0)) fail(end, "cavity.q must be >= 0");
  if (cfg.cavity.extrapolate && cfg.cavity.levels < 3) {
    fail(end, "cavity.levels must be >= 3 when extrapolating");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace blochcav
