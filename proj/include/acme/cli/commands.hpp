#pragma once

#include <iosfwd>

#include "acme/cli/run_config.hpp"
#include "acme/report/report.hpp"

namespace acme::cli {

// Each command builds the full report in memory; the caller emits it. The
// stream receives a short human-readable summary.

// Workload characterization of trace.path: breakdowns by workload and final
// status, duration / queuing-delay / GPU-demand distributions with CDFs.
report::Report run_analyze(const RunConfig& rc, std::ostream& summary);

// Checkpoint overhead and failure campaigns, quota scheduling replay and a
// fault-localization round on a simulated pretraining cluster.
report::Report run_simulate_pretrain(const RunConfig& rc, std::ostream& summary);

// Baseline and/or decoupled evaluation scheduling for eval.datasets.
report::Report run_simulate_eval(const RunConfig& rc, std::ostream& summary);

// Diagnoses diag.log with the shipped (or diag.rules) rule table, escalating
// to the mock agent in diag.mock when given.
report::Report run_diagnose(const RunConfig& rc, std::ostream& summary);

}  // namespace acme::cli
