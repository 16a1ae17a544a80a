// io.hpp: JSON state, canonical-form and certificate files.
//
// Numbers are written with 17 significant digits so files round-trip
// exactly; matrices are row-major in the flat index order of tensor_core.
// Every malformed input raises FormatError with a "source:line:col: ..."
// message.

#pragma once

#include "trisep/canonical.hpp"
#include "trisep/decompose.hpp"
#include "trisep/kernel_search.hpp"
#include "trisep/ppt_support.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace trisep {

inline constexpr const char* kToolVersion = "trisep 1.0.0";

struct StateMeta {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> kind;
  bool normalized = false;
};

struct StateFile {
  DensityOperator rho;
  StateMeta meta;
};

struct CertificateFile {
  ProductDecomposition decomposition;
  double reconstruction = 0.0;
  std::array<double, 9> commutators{};
  std::array<double, 6> ppt_min_eigs{};
  Pivot pivot;
  bool computational_pivot = true;
  std::array<int, 3> support_dims{};
  bool charlie_compressed = false;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;
  std::string tool_version = kToolVersion;
};

std::string state_to_json(const StateFile& file);
StateFile parse_state(const std::string& text, const std::string& source);

CertificateFile certificate_from(const SeparabilityCertificate& cert);
std::string certificate_to_json(const CertificateFile& file);
CertificateFile parse_certificate(const std::string& text, const std::string& source);

std::string canonical_to_json(const CanonicalExtraction& extraction);
std::string kernel_vector_to_json(const ProductKernelVector& kv);

// %.17g, the format used for every number the tool prints.
std::string format_number(double x);

std::string read_text_file(const std::string& path);  // FormatError "path:0:0: cannot open" on failure
void write_text_file(const std::string& path, const std::string& text);

}  // namespace trisep
