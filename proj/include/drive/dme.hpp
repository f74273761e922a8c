#pragma once

// Distributed mean-estimation simulator: n clients encode, a server decodes
// and averages. NMSE is the squared error of the estimated average
// normalized by the mean squared client norm; vNMSE is per-vector.

#include <cstdint>
#include <string>
#include <vector>

#include "drive/analytics.hpp"
#include "drive/baselines.hpp"
#include "drive/quantizers.hpp"

namespace drive::dme {

enum class DmeAlgorithm : std::uint8_t { Drive = 0, DrivePlus = 1, HadamardSQ = 2, TernGrad = 3 };

enum class InputMode : std::uint8_t { SameVector = 0, IndependentVectors = 1 };

struct DmeConfig {
  std::uint32_t n_clients = 1;
  std::uint32_t dim = 1;
  DmeAlgorithm algorithm = DmeAlgorithm::Drive;
  transforms::RotationFamily rotation = transforms::RotationFamily::Hadamard;
  quantizers::ScalePolicy policy = quantizers::ScalePolicy::Unbiased;
  InputMode input_mode = InputMode::SameVector;
  analytics::Distribution distribution = analytics::Distribution::LogNormal01;
  std::uint64_t trials = 1;
  std::uint64_t master_seed = 1;
  unsigned threads = 1;  // trial-level parallelism; results independent of it
};

struct TrialReport {
  double mean_nmse = 0.0;
  double stderr_nmse = 0.0;
  double mean_vnmse = 0.0;
  double stderr_vnmse = 0.0;
  std::uint64_t trials = 0;
  double wall_time_per_encode = 0.0;  // seconds
};

struct TrialSample {
  double nmse = 0.0;
  std::vector<double> vnmse;   // one entry per client
  double encode_seconds = 0.0;  // summed over clients, encode calls only
};

// Throws std::invalid_argument on inconsistent configurations
// (e.g. ConstantExpectation scale with the Hadamard family).
void validate(const DmeConfig& cfg);

TrialSample run_trial(const DmeConfig& cfg, std::uint64_t trial_index);

TrialReport run_experiment(const DmeConfig& cfg);

struct ScalingRow {
  std::uint32_t n = 0;
  double nmse = 0.0;
  double stderr_nmse = 0.0;
  double vnmse = 0.0;
  double stderr_vnmse = 0.0;
};

// Reruns cfg at each client count; under an unbiased policy the contract is
// nmse ~= vnmse / n.
std::vector<ScalingRow> nmse_scaling_check(const DmeConfig& cfg,
                                           const std::vector<std::uint32_t>& n_values);

std::string csv_header();
std::string csv_row(const DmeConfig& cfg, const TrialReport& report);

std::string algorithm_name(DmeAlgorithm a);
std::string rotation_name(transforms::RotationFamily f);
std::string policy_name(quantizers::ScalePolicy p);
std::string distribution_name(analytics::Distribution d);
std::string mode_name(InputMode m);

}  // namespace drive::dme
