#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "mdcert/engine.hpp"
#include "mdcert/verify.hpp"

namespace mdcert {

/// Configuration error carrying the JSON pointer of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string pointer, const std::string& what)
      : std::runtime_error(pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

nlohmann::json to_json(const Eigen::Matrix2d& m);
Eigen::Matrix2d matrix2d_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ProblemClass& pc);
ProblemClass problem_class_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Tolerances& tol);

nlohmann::json to_json(const CentralizedCertificate& c);
nlohmann::json to_json(const ConvexCentralizedCertificate& c);
nlohmann::json to_json(const DistributedCertificate& c);
nlohmann::json to_json(const ConvexDistributedCertificate& c);

nlohmann::json to_json(const BoundReport& rep);

/// Parsed certificate file: the payload matching (kind, mode) is set.
struct CertificateFile {
  bool distributed = false;
  Mode mode = Mode::StronglyConvex;
  ProblemClass pc;
  std::optional<CentralizedCertificate> centralized;
  std::optional<ConvexCentralizedCertificate> convex_centralized;
  std::optional<DistributedCertificate> dist;
  std::optional<ConvexDistributedCertificate> convex_dist;
  nlohmann::json graph;  // metadata object; may be null
  nlohmann::json raw;
};

CertificateFile load_certificate(const std::string& path);

SweepConfig parse_sweep_config(const nlohmann::json& j);

/// Grid spec "lo:hi:steps" expanded logarithmically.
std::vector<double> parse_grid_spec(const std::string& spec);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

/// FNV-1a 64 hash of a file's bytes, hex-encoded.
std::string file_hash_hex(const std::string& path);

/// Hash of the problem-defining parts of a certificate (kind, mode, class,
/// and the Lyapunov weighting for distributed certificates). Rate values are
/// deliberately excluded so tampered rates still reach the bound checks.
std::string certificate_identity_hash(const CertificateFile& cf);

}  // namespace mdcert
