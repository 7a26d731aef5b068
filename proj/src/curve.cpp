#include "decoh/curve.hpp"

#include <sstream>

#include "decoh/errors.hpp"
#include "decoh/io.hpp"
#include "json.hpp"

namespace decoh {

std::string DecoherenceCurve::to_csv() const {
  std::ostringstream out;
  out << "t,a_t,b_t,abs_chi,exponent,envelope_phi\n";
  for (std::size_t i = 0; i < size(); ++i) {
    out << format_double(t[i]) << ',' << format_double(a_t[i]) << ','
        << format_double(b_t[i]) << ',' << format_double(abs_chi[i]) << ','
        << format_double(exponent[i]) << ',' << format_double(envelope_phi[i])
        << '\n';
  }
  return out.str();
}

std::string DecoherenceCurve::to_json() const {
  nlohmann::json doc;
  doc["metadata"] = metadata_json.empty()
                        ? nlohmann::json::object()
                        : nlohmann::json::parse(metadata_json);
  doc["t"] = t;
  doc["a_t"] = a_t;
  doc["b_t"] = b_t;
  doc["abs_chi"] = abs_chi;
  doc["exponent"] = exponent;
  doc["envelope_phi"] = envelope_phi;
  return doc.dump(2) + "\n";
}

void DecoherenceCurve::write_csv(const std::string& path) const {
  atomic_write(path, to_csv());
}

void DecoherenceCurve::write_json(const std::string& path) const {
  atomic_write(path, to_json());
}

}  // namespace decoh
