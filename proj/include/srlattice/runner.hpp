#pragma once

// Batch front end behind the CLI verbs: table reproductions, diagnostics,
// demo constructions and Monte Carlo reference runs. Every function writes
// CSV files with a provenance header into cfg.out_dir and returns a process
// exit status (0 ok, 1 invariant failure).

#include <optional>
#include <string>

#include "srlattice/config.hpp"

namespace srl {

struct TableRunOptions {
    bool dry_run = false;
    bool resume = false; // reuse matching checkpoints in cfg.checkpoint_dir
    std::optional<BoundSide> bound; // restrict table1 to one bound
};

int run_table(int which, const RunConfig& cfg, const TableRunOptions& opt = {});
int run_diagnostics(const RunConfig& cfg);
int run_demos(const RunConfig& cfg);
int run_mc(const RunConfig& cfg);

/// Total lattice state count sum_k (2k+1)^2 for k = 0..n.
long long lattice_state_count(int n);

/// Estimated inner-loop operation count of one dp_grid run.
long long dp_op_estimate(const LatticeSpec& spec, int M);

} // namespace srl
