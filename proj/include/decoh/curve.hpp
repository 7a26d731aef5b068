// Sampled decoherence curve of one Weyl label under a coupled model, plus its
// CSV/JSON serialization.
#pragma once

#include <string>
#include <vector>

namespace decoh {

struct DecoherenceCurve {
  std::vector<double> t;
  std::vector<double> a_t;
  std::vector<double> b_t;
  std::vector<double> abs_chi;
  std::vector<double> exponent;
  std::vector<double> envelope_phi;  // non-decreasing forward envelope
  std::string metadata_json;         // model, state, and grid description

  std::size_t size() const { return t.size(); }

  // Columns: t, a_t, b_t, abs_chi, exponent, envelope_phi.
  std::string to_csv() const;
  std::string to_json() const;
  void write_csv(const std::string& path) const;
  void write_json(const std::string& path) const;
};

}  // namespace decoh
