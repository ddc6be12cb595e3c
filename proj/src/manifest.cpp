#include "zbsim/manifest.hpp"

#include <fstream>
#include <functional>

namespace zbsim::manifest {

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << text;
  if (!f.good()) throw IoError("write failed: " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path);
  std::string s((std::istreambuf_iterator<char>(f)),
                std::istreambuf_iterator<char>());
  return s;
}

namespace {

void strip_timing(Json& j) {
  if (j.is_object()) {
    j.erase("wall_clock_s");
    for (auto& [k, v] : j.items()) strip_timing(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_timing(v);
  }
}

} // namespace

bool equal_modulo_timing(const std::string& a, const std::string& b,
                         std::string* why) {
  Json ja, jb;
  try {
    ja = Json::parse(a);
    jb = Json::parse(b);
  } catch (const std::exception& e) {
    if (why) *why = std::string("parse error: ") + e.what();
    return false;
  }
  strip_timing(ja);
  strip_timing(jb);
  if (ja == jb) return true;
  if (why) {
    *why = "documents differ";
    // Point at the first unequal top-level key for a usable message.
    if (ja.is_object() && jb.is_object()) {
      for (auto& [k, v] : ja.items()) {
        if (!jb.contains(k) || jb[k] != v) {
          *why = "first differing key: " + k;
          break;
        }
      }
      for (auto& [k, v] : jb.items()) {
        if (!ja.contains(k)) {
          *why = "extra key: " + k;
          break;
        }
      }
    }
  }
  return false;
}

} // namespace zbsim::manifest
