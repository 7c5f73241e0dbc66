#pragma once

#include <functional>
#include <string>
#include <vector>

#include "config.hpp"
#include "container.hpp"

namespace arcrom::cli {

/// Missing or mismatched input artifacts; maps to exit code 2 like config errors.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Arcs of sample i: the explicit arcs when configured, otherwise a sampled
/// configuration of geometry.M arcs with a seed derived from (run.seed, i).
std::vector<Arc> configuration(const ExperimentConfig& cfg, int sample);
MultiArcConfig multi_arc(const ExperimentConfig& cfg, std::vector<Arc> arcs);

/// Median wall time of `repeats` calls, in milliseconds.
double median_ms(int repeats, const std::function<void()>& body);

std::string container_path(const ExperimentConfig& cfg);

int cmd_hf_solve(const ExperimentConfig& cfg);
int cmd_offline(const ExperimentConfig& cfg);
int cmd_rb_solve(const ExperimentConfig& cfg);
int cmd_sweep(const ExperimentConfig& cfg);
int cmd_validate(const ExperimentConfig& cfg);

}  // namespace arcrom::cli
