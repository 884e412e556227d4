#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sfsim/types.hpp"

namespace sfsim {

struct AmplitudeBatch {
  std::vector<std::uint64_t> indices;
  std::vector<cdouble> amps;

  std::size_t size() const { return indices.size(); }
  static AmplitudeBatch zeros(const std::vector<std::uint64_t>& idx) {
    return {idx, std::vector<cdouble>(idx.size())};
  }
  // Elementwise sum; index lists must match.
  void add(const AmplitudeBatch& other);
  double norm2() const;
};

// `index_hex re im`, scientific, `digits` significant digits. Header entries
// are written as `# key value` lines first.
void write_amplitudes(std::ostream& out, const AmplitudeBatch& b, int digits = 9,
                      const std::map<std::string, std::string>& header = {});
void write_amplitudes_file(const std::string& path, const AmplitudeBatch& b, int digits = 9,
                           const std::map<std::string, std::string>& header = {});

struct AmplitudeFile {
  AmplitudeBatch batch;
  std::map<std::string, std::string> header;
};

AmplitudeFile read_amplitudes(std::istream& in);
AmplitudeFile read_amplitudes_file(const std::string& path);

}  // namespace sfsim
