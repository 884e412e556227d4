#include "sfsim/amplitudes.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sfsim/hash.hpp"

namespace sfsim {

void AmplitudeBatch::add(const AmplitudeBatch& other) {
  if (other.indices != indices) throw Error("amplitude batches cover different indices");
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] += other.amps[i];
}

double AmplitudeBatch::norm2() const {
  double s = 0;
  for (const cdouble& a : amps) s += std::norm(a);
  return s;
}

void write_amplitudes(std::ostream& out, const AmplitudeBatch& b, int digits,
                      const std::map<std::string, std::string>& header) {
  for (const auto& [k, v] : header) out << "# " << k << ' ' << v << '\n';
  char buf[96];
  for (std::size_t i = 0; i < b.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%llx %.*e %.*e\n", static_cast<unsigned long long>(b.indices[i]),
                  digits - 1, b.amps[i].real(), digits - 1, b.amps[i].imag());
    out << buf;
  }
}

void write_amplitudes_file(const std::string& path, const AmplitudeBatch& b, int digits,
                           const std::map<std::string, std::string>& header) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_amplitudes(out, b, digits, header);
  if (!out) throw Error("write failed for " + path);
}

AmplitudeFile read_amplitudes(std::istream& in) {
  AmplitudeFile f;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key, value;
      hs >> key;
      std::getline(hs >> std::ws, value);
      if (!key.empty()) f.header[key] = value;
      continue;
    }
    std::istringstream ls(line);
    std::string idx;
    double re, im;
    if (!(ls >> idx >> re >> im)) throw ParseError(line_no, "expected `index_hex re im`");
    try {
      f.batch.indices.push_back(parse_hex64(idx));
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    f.batch.amps.emplace_back(re, im);
  }
  return f;
}

AmplitudeFile read_amplitudes_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_amplitudes(in);
}

}  // namespace sfsim
