#pragma once

// Run configuration: one JSON document holding the model, truncation,
// lattice, projection, Monte Carlo and output settings. The config digest
// covers everything that determines results (not execution details like
// thread count or directories), so provenance headers are stable across
// worker counts.

#include <array>
#include <string>
#include <vector>

#include "srlattice/dp.hpp"
#include "srlattice/mc.hpp"
#include "srlattice/model.hpp"

namespace srl {

struct RunConfig {
    HestonParams model;
    TruncationBounds bounds;
    int n = 400;
    double sigma_tilde = 5.0;
    int M = 400;
    ProjectionScheme projection = ProjectionScheme::PS1;
    McConfig mc;
    std::vector<double> x_grid;
    std::vector<double> table2_sigma_hi;
    std::vector<int> table3_n;
    std::vector<int> table4_n;
    double table_x = 20.0;

    std::string out_dir = "out";
    int threads = 0;
    std::string checkpoint_dir;
    int checkpoint_every = 1;
    Precision precision = Precision::F64;
    bool dump_terminals = false;

    /// Headline parameter set and grids (what the table runs use).
    static RunConfig defaults();

    static RunConfig load(const std::string& path);
    static RunConfig from_json_text(const std::string& text);
    std::string to_json_text() const;

    /// SHA-256 of the canonical result-determining fields.
    std::array<unsigned char, 32> digest() const;
    std::string digest_hex() const;

    LatticeSpec lattice() const;
    void validate() const;
    /// x must sit on GR for the given control grid.
    void require_x_on_grid(double x, int M_used) const;
};

const char* projection_name(ProjectionScheme s);
ProjectionScheme projection_from_name(const std::string& name);

} // namespace srl
