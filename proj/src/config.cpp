#include "ftf/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ftf/constants.hpp"
#include "ftf/errors.hpp"

namespace ftf {

namespace {

constexpr const char* kModule = "config";

const char* kDeviceA = R"(# FTF device: two fluxonium qubits with a grounded tunable-transmon coupler
[fluxonium1]
e_c = 1.41
e_l = 0.8
e_j = 6.27
phi_ext = 0.5
basis_size = 120
n_jj = 102

[fluxonium2]
e_c = 1.3
e_l = 0.59
e_j = 5.71
phi_ext = 0.5
basis_size = 120
n_jj = 102

[transmon]
e_c = 0.32
e_j1 = 3.4
e_j2 = 13
phi_ext = 0.5
charge_cutoff = 30

[couplings]
j_1c = 0.57
j_2c = 0.56
j_12 = 0.125

[truncation]
k1 = 8
kc = 6
k2 = 8
)";

const char* kDeviceB = R"(# FTF device B, nominally identical design
[fluxonium1]
e_c = 1.41
e_l = 0.88
e_j = 5.7
phi_ext = 0.5
basis_size = 120
n_jj = 102

[fluxonium2]
e_c = 1.33
e_l = 0.6
e_j = 5.4
phi_ext = 0.5
basis_size = 120
n_jj = 102

[transmon]
e_c = 0.3
e_j1 = 3
e_j2 = 13
phi_ext = 0.5
charge_cutoff = 30

[couplings]
j_1c = 0.55
j_2c = 0.55
j_12 = 0.12

[truncation]
k1 = 8
kc = 6
k2 = 8
)";

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct ParsedFile {
  // section -> key -> (value, line)
  std::map<std::string, std::map<std::string, std::pair<std::string, int>>> sections;
};

ParsedFile parse_lines(const std::string& text, const std::string& origin) {
  ParsedFile out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error(kModule, origin + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw Error(kModule, origin + ":" + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(kModule, origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw Error(kModule, origin + ":" + std::to_string(lineno) + ": empty key or value");
    if (section.empty())
      throw Error(kModule, origin + ":" + std::to_string(lineno) + ": key outside any section");
    if (!out.sections[section].emplace(key, std::make_pair(value, lineno)).second)
      throw Error(kModule, origin + ":" + std::to_string(lineno) + ": duplicate key '" + section +
                               "." + key + "'");
  }
  return out;
}

class SectionReader {
 public:
  SectionReader(const ParsedFile& file, std::string section, std::string origin)
      : file_(file), section_(std::move(section)), origin_(std::move(origin)) {
    if (!file_.sections.count(section_))
      throw Error(kModule, origin_ + ": missing required section [" + section_ + "]");
  }

  double number(const std::string& key) {
    const std::string raw = fetch(key);
    try {
      size_t pos = 0;
      const double v = std::stod(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw Error(kModule, origin_ + ": value of '" + section_ + "." + key +
                               "' is not a number: '" + raw + "'");
    }
  }

  int integer(const std::string& key) {
    const double v = number(key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
      throw Error(kModule, origin_ + ": value of '" + section_ + "." + key + "' must be an integer");
    return i;
  }

  int integer_or(const std::string& key, int fallback) {
    if (!file_.sections.at(section_).count(key)) {
      used_.insert(key);
      return fallback;
    }
    return integer(key);
  }

  void allow_metadata(const std::string& key) { used_.insert(key); }

  void finish() {
    for (const auto& [key, value] : file_.sections.at(section_)) {
      if (!used_.count(key))
        throw Error(kModule, origin_ + ":" + std::to_string(value.second) + ": unknown key '" +
                                 section_ + "." + key + "'");
    }
  }

 private:
  std::string fetch(const std::string& key) {
    const auto& sec = file_.sections.at(section_);
    const auto it = sec.find(key);
    if (it == sec.end())
      throw Error(kModule, origin_ + ": missing required key '" + section_ + "." + key + "'");
    used_.insert(key);
    return it->second.first;
  }

  const ParsedFile& file_;
  std::string section_;
  std::string origin_;
  std::set<std::string> used_;
};

FluxoniumParams read_fluxonium(const ParsedFile& file, const std::string& section,
                               const std::string& origin) {
  SectionReader r(file, section, origin);
  FluxoniumParams p;
  p.e_c = r.number("e_c");
  p.e_l = r.number("e_l");
  p.e_j = r.number("e_j");
  p.phi_ext = constants::two_pi * r.number("phi_ext");
  p.basis_size = r.integer_or("basis_size", 120);
  r.allow_metadata("n_jj");  // junction-array count, metadata only
  r.allow_metadata("omega_r_ghz");
  r.finish();
  if (p.e_c <= 0) throw Error(kModule, origin + ": invariant violated: " + section + ".e_c must be > 0");
  if (p.e_l <= 0) throw Error(kModule, origin + ": invariant violated: " + section + ".e_l must be > 0");
  if (p.e_j < 0) throw Error(kModule, origin + ": invariant violated: " + section + ".e_j must be >= 0");
  if (p.basis_size < 20)
    throw Error(kModule, origin + ": invariant violated: " + section + ".basis_size must be >= 20");
  return p;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

DeviceSpec parse_device_config_text(const std::string& text, const std::string& origin) {
  const ParsedFile file = parse_lines(text, origin);
  for (const auto& [name, _] : file.sections) {
    if (name != "fluxonium1" && name != "fluxonium2" && name != "transmon" &&
        name != "couplings" && name != "truncation")
      throw Error(kModule, origin + ": unknown section [" + name + "]");
  }

  DeviceSpec d;
  d.fluxonium1 = read_fluxonium(file, "fluxonium1", origin);
  d.fluxonium2 = read_fluxonium(file, "fluxonium2", origin);

  {
    SectionReader r(file, "transmon", origin);
    d.transmon.e_c = r.number("e_c");
    d.transmon.e_j1 = r.number("e_j1");
    d.transmon.e_j2 = r.number("e_j2");
    d.transmon.phi_ext = constants::two_pi * r.number("phi_ext");
    d.transmon.charge_cutoff = r.integer_or("charge_cutoff", 30);
    r.allow_metadata("omega_r_ghz");
    r.finish();
    if (d.transmon.e_c <= 0)
      throw Error(kModule, origin + ": invariant violated: transmon.e_c must be > 0");
    if (d.transmon.e_j1 < 0 || d.transmon.e_j2 < 0)
      throw Error(kModule, origin + ": invariant violated: transmon junction energies must be >= 0");
    if (d.transmon.charge_cutoff < 15)
      throw Error(kModule, origin + ": invariant violated: transmon.charge_cutoff must be >= 15");
  }
  {
    SectionReader r(file, "couplings", origin);
    d.j_1c = r.number("j_1c");
    d.j_2c = r.number("j_2c");
    d.j_12 = r.number("j_12");
    r.finish();
  }
  {
    SectionReader r(file, "truncation", origin);
    d.levels[0] = r.integer_or("k1", 8);
    d.levels[1] = r.integer_or("kc", 6);
    d.levels[2] = r.integer_or("k2", 8);
    r.finish();
    const long dim = static_cast<long>(d.levels[0]) * d.levels[1] * d.levels[2];
    if (dim < 8 || dim > 2000)
      throw Error(kModule, origin + ": invariant violated: truncation product must be in [8, 2000]");
  }
  return d;
}

const std::map<std::string, std::string>& bundled_configs() {
  static const std::map<std::string, std::string> configs = {
      {"device_a", kDeviceA},
      {"device_b", kDeviceB},
  };
  return configs;
}

std::string load_device_config_text(const std::string& path_or_name) {
  std::ifstream in(path_or_name);
  if (in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  const auto it = bundled_configs().find(path_or_name);
  if (it != bundled_configs().end()) return it->second;
  throw Error(kModule, "config '" + path_or_name + "' is neither a readable file nor a bundled name");
}

DeviceSpec parse_device_config(const std::string& path_or_name) {
  return parse_device_config_text(load_device_config_text(path_or_name), path_or_name);
}

std::string serialize_device_config(const DeviceSpec& d) {
  std::ostringstream out;
  auto fluxonium = [&](const char* name, const FluxoniumParams& p) {
    out << "[" << name << "]\n";
    out << "e_c = " << format_number(p.e_c) << "\n";
    out << "e_l = " << format_number(p.e_l) << "\n";
    out << "e_j = " << format_number(p.e_j) << "\n";
    out << "phi_ext = " << format_number(p.phi_ext / constants::two_pi) << "\n";
    out << "basis_size = " << p.basis_size << "\n\n";
  };
  fluxonium("fluxonium1", d.fluxonium1);
  fluxonium("fluxonium2", d.fluxonium2);
  out << "[transmon]\n";
  out << "e_c = " << format_number(d.transmon.e_c) << "\n";
  out << "e_j1 = " << format_number(d.transmon.e_j1) << "\n";
  out << "e_j2 = " << format_number(d.transmon.e_j2) << "\n";
  out << "phi_ext = " << format_number(d.transmon.phi_ext / constants::two_pi) << "\n";
  out << "charge_cutoff = " << d.transmon.charge_cutoff << "\n\n";
  out << "[couplings]\n";
  out << "j_1c = " << format_number(d.j_1c) << "\n";
  out << "j_2c = " << format_number(d.j_2c) << "\n";
  out << "j_12 = " << format_number(d.j_12) << "\n\n";
  out << "[truncation]\n";
  out << "k1 = " << d.levels[0] << "\n";
  out << "kc = " << d.levels[1] << "\n";
  out << "k2 = " << d.levels[2] << "\n";
  return out.str();
}

}  // namespace ftf
