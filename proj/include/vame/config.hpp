#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vame/nat.hpp"

namespace vame {

/// A configuration file could not be parsed or fails validation.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One experiment, as read from an INI-style config with sections
/// [operator], [contraction], [schedule], and [run]. Vector-valued keys
/// accept comma-separated lists; a single value broadcasts to the ambient
/// dimension.
struct ExperimentConfig {
  // [operator]
  std::string op_kind = "scaled_identity";  // scaled_identity | psd_linear | box | l1
  Nat dim = 4;
  double op_scale = 1.0;              // scaled_identity: the factor c >= 0
  std::vector<double> spectrum;       // psd_linear: nonnegative eigenvalues
  std::vector<double> box_lo, box_hi; // box: bounds (broadcastable)
  double l1_weight = 1.0;             // l1: the weight >= 0

  // [contraction]
  std::string f_kind = "affine";  // affine | constant
  double alpha = 0.5;             // affine contraction constant in [0,1)
  std::vector<double> anchor;     // constant: the target u (broadcastable)
  std::vector<double> offset;     // affine: the offset b (broadcastable)
  unsigned rotation_seed = 1;     // affine: seed of the orthogonal part

  // [schedule]
  std::string preset = "example1";  // example1 | example2 | generic
  double lambda_value = 1.0;        // example1: the constant step
  double e_star_norm = 0.0;         // example2: magnitude of the error direction
  double error_scale = 0.0;         // generic: magnitude of the decaying errors
  Nat brute_horizon = 10000;        // generic: mining horizon for its moduli

  // [run]
  std::string scheme = "vame";  // vame | vam | hppa
  std::vector<double> x0;       // starting point (broadcastable; empty = zero)
  Nat horizon = 1000;
  Nat k_max = 10;
  unsigned seed = 1;
  std::vector<Nat> m_list;      // frozen indices for fixed-step certificates
  std::string negative_control = "none";  // none | shrink_moduli | nonsummable_errors
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates; throws ConfigError with file/line context.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

/// Round-trips through parse_config to the same value.
std::string serialize_config(const ExperimentConfig& config);

}  // namespace vame
