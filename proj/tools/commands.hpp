#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coannot/harness.hpp"

namespace coannot::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kNoSupervision = 3,
  kDivergence = 4,
  kEmptyIteration = 5,
};

struct AnnotateArgs {
  std::string samples;
  std::string ontology;
  std::string obo;
  std::string lexicon;
  std::string labels;
  std::string out;
  std::string resolve = "relation";
  int iters = 5;
  double threshold = 0.3;
  std::uint64_t seed = 0;
  std::string model_out;
  std::string history;
};

struct EvaluateArgs {
  std::string pred;
  std::string gold;
  std::string ontology;
  std::string curve;
  std::string report;
};

struct ExperimentArgs {
  SynthConfig synth;
  std::string out_dir;
  std::string resolve = "relation";
  int iters = 5;
  double threshold = 0.3;
  std::vector<double> fractions;
  int repeats = 1;
};

int cmd_annotate(const AnnotateArgs& args);
int cmd_evaluate(const EvaluateArgs& args);
int cmd_synth(const ExperimentArgs& args);
int cmd_strategy_compare(const ExperimentArgs& args);
int cmd_noise_sweep(const ExperimentArgs& args);
int cmd_data_scaling(const ExperimentArgs& args);

// Maps a library exception to an exit code after printing it.
int report_error(const std::exception& e);

}  // namespace coannot::cli
