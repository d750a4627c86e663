#pragma once

#include <string>
#include <vector>

#include "vame/config.hpp"
#include "vame/iteration.hpp"
#include "vame/rates.hpp"
#include "vame/verify.hpp"

namespace vame {

/// The concrete ingredients a config describes. The schedule already
/// reflects the scheme (vam zeroes the error terms; negative controls are
/// applied) and carries its moduli.
struct BuiltExperiment {
  ResolventOperator op;
  ContractionMap f;
  ParamSchedule sched;
  Vec x0;
};

ResolventOperator build_operator(const ExperimentConfig& config);
ContractionMap build_contraction(const ExperimentConfig& config);
BuiltExperiment build_experiment(const ExperimentConfig& config);

/// Runs the scheme for config.horizon steps.
IterationTrace run_experiment(const ExperimentConfig& config);
IterationTrace run_experiment(const ExperimentConfig& config, const BuiltExperiment& built);

/// Constructs every certificate the config supports: the general rates
/// (phi/psi and one theta_m per requested frozen index, in their error-free
/// forms when the run carries no errors) plus the closed-form preset rates
/// where the schedule has them. The shrink_moduli control, when requested,
/// deflates every modulus by horizon/2 afterwards.
std::vector<RateCertificate> build_certificates(const ExperimentConfig& config,
                                                const BuiltExperiment& built);

/// A deterministic unit vector, used for seeded error directions.
Vec seeded_unit_vector(Eigen::Index dim, unsigned seed);

}  // namespace vame
