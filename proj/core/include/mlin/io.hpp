#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mlin/analysis.hpp"
#include "mlin/estimator.hpp"
#include "mlin/kernels.hpp"
#include "mlin/lattice.hpp"
#include "mlin/operators.hpp"
#include "mlin/wavelets.hpp"

namespace mlin {

/// Deterministic double formatting used by every text artifact ("%.17g").
std::string format_double(double v);

// LatticeSet: one point per line, the m blocks space-separated, the n
// coordinates of each block comma-separated ("0 1" for n = 1, m = 2).
void save_lattice_set(std::ostream& os, const LatticeSet& s);
LatticeSet load_lattice_set(std::istream& is, int n, int m);

// ColumnSplit report: CSV part_index,size,projection_bound,projection_actual;
// the last part certifies its maximal column size against N_{m-1}.
void save_column_split_csv(std::ostream& os, const ColumnSplit& cs);

// CoefficientTable: CSV lambda,G,k,re,im with k space-separated; rows with
// |b| <= threshold are omitted.
void save_coefficient_table_csv(std::ostream& os, const CoefficientTable& t,
                                double threshold = 0.0);

// MotherWavelets cache: resolution header then raw samples, plain text.
void save_mother_wavelets(std::ostream& os, const MotherWavelets& w);

// GridFunction: header "n m G L" then "re im" per sample; m = 1 for plain
// functions, DenseSymbol uses the same layout over the product lattice.
void save_grid_text(std::ostream& os, int n, int m, int G, double L,
                    std::span<const cplx> values);
GridFunction load_grid_function(std::istream& is);
DenseSymbol load_dense_symbol(std::istream& is);

// SphereFunction: "mn q" header then angle(s)-value rows.
void save_sphere_function(std::ostream& os, const SphereFunction& s);

// ScalingReport: CSV parameter,estimate,envelope,ratio plus a JSON summary
// with slope, residual, ratio spread, and seed.
void save_scaling_csv(std::ostream& os, const ScalingReport& rep);
std::string scaling_json(const ScalingReport& rep);

void write_file(const std::string& path, const std::string& contents);
std::string slurp_file(const std::string& path);

} // namespace mlin
