#include "tpflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace tpflow {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("key '" + key + "': not a number: " + v);
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("key '" + key + "': not an integer: " + v);
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected true or false, got " + v);
}

std::string scenario_of(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line.substr(0, line.find('#')));
    const auto eq = line.find('=');
    if (eq != std::string::npos && trim(line.substr(0, eq)) == "scenario") return trim(line.substr(eq + 1));
  }
  return {};
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
  return os.str();
}

}  // namespace

RunConfig default_config(const std::string& scenario) {
  RunConfig c;
  c.scenario = scenario;
  if (scenario == "converge") {
    c.schemes = {"MP", "BE", "TL1", "TL2"};
    c.meshes = {2, 4, 8, 16, 32, 64, 128};
  } else if (scenario == "longtime") {
    c.schemes = {"MP", "BE", "TL1", "TL2"};
    c.taus = {0.05, 1.0};
    c.mesh = 64;
    c.final_time = 20.0;
  } else if (scenario == "q5spot") {
    c.problem = "q5spot";
    c.model = "brooks-corey";
    c.schemes = {"MP", "BE", "TL1", "TL2"};
    c.taus = {1.0, 0.5, 0.25};
    c.mesh = 40;
    c.degree = 2;
    c.final_time = 750.0;
    c.write_vtk = true;
  } else if (scenario != "custom") {
    throw ConfigError("key 'scenario': unknown scenario " + scenario);
  }
  c.output_dir = "out/" + scenario;
  return c;
}

RunConfig parse_config(const std::string& text, RunConfig c) {
  std::istringstream in(text);
  std::string raw;
  std::set<std::string> seen;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("key '" + key + "': given twice");

    if (key == "scenario") {
      if (value != c.scenario) throw ConfigError("key 'scenario': " + value + " conflicts with " + c.scenario);
    } else if (key == "problem") c.problem = value;
    else if (key == "model") c.model = value;
    else if (key == "scheme") c.scheme = value;
    else if (key == "schemes") c.schemes = split_list(value);
    else if (key == "tau") c.tau = to_double(key, value);
    else if (key == "taus") {
      c.taus.clear();
      for (const auto& v : split_list(value)) c.taus.push_back(to_double(key, v));
    } else if (key == "mesh") c.mesh = to_int(key, value);
    else if (key == "meshes") {
      c.meshes.clear();
      for (const auto& v : split_list(value)) c.meshes.push_back(to_int(key, v));
    } else if (key == "degree") c.degree = to_int(key, value);
    else if (key == "final_time") c.final_time = to_double(key, value);
    else if (key == "tol") c.tol = to_double(key, value);
    else if (key == "max_iters") c.max_iters = to_int(key, value);
    else if (key == "output_dir") c.output_dir = value;
    else if (key == "write_vtk") c.write_vtk = to_bool(key, value);
    else if (key == "timing") c.timing = to_bool(key, value);
    else throw ConfigError("key '" + key + "': unknown key");
  }
  return c;
}

RunConfig load_config(const std::string& path, const std::string& fallback_scenario) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::string scenario = scenario_of(text);
  if (scenario.empty()) scenario = fallback_scenario;
  return parse_config(text, default_config(scenario));
}

void validate_config(const RunConfig& c) {
  static const std::set<std::string> schemes = {"MP", "BE", "TL1", "TL2"};
  const auto check_scheme = [&](const std::string& key, const std::string& s) {
    std::string u = s;
    std::transform(u.begin(), u.end(), u.begin(), [](unsigned char ch) { return std::toupper(ch); });
    if (!schemes.count(u)) throw ConfigError("key '" + key + "': unknown scheme " + s);
  };
  if (c.scenario == "custom") {
    if (c.problem != "mms" && c.problem != "relax" && c.problem != "q5spot")
      throw ConfigError("key 'problem': expected mms, relax or q5spot");
    check_scheme("scheme", c.scheme);
    if (!(c.tau > 0.0)) throw ConfigError("key 'tau': must be positive");
    if (c.mesh < 1) throw ConfigError("key 'mesh': must be at least 1");
  } else {
    if (c.schemes.empty()) throw ConfigError("key 'schemes': must not be empty");
    for (const auto& s : c.schemes) check_scheme("schemes", s);
  }
  if (c.model != "log" && c.model != "brooks-corey") throw ConfigError("key 'model': expected log or brooks-corey");
  const bool wants_bc = c.problem == "q5spot" || c.scenario == "q5spot";
  if (wants_bc != (c.model == "brooks-corey"))
    throw ConfigError("key 'model': the quarter-five-spot problem uses brooks-corey, the others log");
  if (c.scenario == "converge") {
    if (c.meshes.empty()) throw ConfigError("key 'meshes': must not be empty");
    for (std::size_t k = 0; k < c.meshes.size(); ++k) {
      if (c.meshes[k] < 1) throw ConfigError("key 'meshes': entries must be at least 1");
      if (k && c.meshes[k] <= c.meshes[k - 1]) throw ConfigError("key 'meshes': must be increasing");
    }
  }
  if (c.scenario == "longtime" || c.scenario == "q5spot") {
    if (c.taus.empty()) throw ConfigError("key 'taus': must not be empty");
    for (double t : c.taus)
      if (!(t > 0.0)) throw ConfigError("key 'taus': entries must be positive");
    if (c.mesh < 1) throw ConfigError("key 'mesh': must be at least 1");
  }
  if (c.degree != 1 && c.degree != 2) throw ConfigError("key 'degree': must be 1 or 2");
  if (!(c.final_time > 0.0)) throw ConfigError("key 'final_time': must be positive");
  if (!(c.tol > 1e-10)) throw ConfigError("key 'tol': must exceed the linear solver tolerance 1e-10");
  if (c.max_iters < 1) throw ConfigError("key 'max_iters': must be at least 1");
  if (c.output_dir.empty()) throw ConfigError("key 'output_dir': must not be empty");
}

std::string to_text(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "scenario = " << c.scenario << '\n'
     << "problem = " << c.problem << '\n'
     << "model = " << c.model << '\n'
     << "scheme = " << c.scheme << '\n'
     << "schemes = " << join(c.schemes) << '\n'
     << "tau = " << c.tau << '\n'
     << "taus = " << join(c.taus) << '\n'
     << "mesh = " << c.mesh << '\n'
     << "meshes = " << join(c.meshes) << '\n'
     << "degree = " << c.degree << '\n'
     << "final_time = " << c.final_time << '\n'
     << "tol = " << c.tol << '\n'
     << "max_iters = " << c.max_iters << '\n'
     << "output_dir = " << c.output_dir << '\n'
     << "write_vtk = " << (c.write_vtk ? "true" : "false") << '\n'
     << "timing = " << (c.timing ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace tpflow
