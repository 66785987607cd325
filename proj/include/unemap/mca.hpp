#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "unemap/dataset.hpp"
#include "unemap/matrix.hpp"

namespace unemap {

// n records x Q qualitative variables, each value an index into that
// variable's modality list.
struct CategoricalTable {
  std::vector<std::string> ids;
  std::vector<std::string> variables;
  std::vector<std::vector<std::string>> modalities;  // per variable
  std::vector<std::vector<int>> codes;               // per record, per variable
};

CategoricalTable categorical_table(const CodedDataset& data, std::span<const Qual> variables);

struct IndicatorColumn {
  std::size_t variable = 0;  // index into IndicatorMatrix::variables
  std::string modality;
};

struct IndicatorMatrix {
  std::vector<std::string> variables;
  std::vector<IndicatorColumn> columns;
  Matrix z;  // n x J, 0/1
  std::vector<std::size_t> column_counts;

  std::size_t n() const { return z.rows(); }
  std::size_t q() const { return variables.size(); }
  std::size_t j() const { return columns.size(); }
};

// One-hot block per variable, columns in variable order then modality order.
IndicatorMatrix indicator(const CategoricalTable& table);

struct McaResult {
  std::vector<std::string> variables;
  std::vector<IndicatorColumn> columns;  // modalities kept after dropping empty ones
  std::vector<double> eigenvalues;       // all J - Q nontrivial ones, descending
  std::vector<double> inertia_share;     // percent of total inertia per eigenvalue
  std::size_t axes = 0;
  std::vector<double> masses;            // per column
  Matrix column_coordinates;             // J x axes, principal
  Matrix contributions;                  // J x axes, fraction of the axis inertia
  Matrix row_coordinates;                // n x axes, principal
  std::vector<std::string> warnings;
};

// Correspondence analysis of the indicator matrix. Modalities no record uses
// are dropped with a warning. Each axis is oriented so the first column (in
// column order) with |coordinate| > 1e-10 is positive.
McaResult fit_mca(const IndicatorMatrix& indicator, std::size_t axes);

struct ModalityPoint {
  std::string variable;
  std::string modality;
  double x = 0.0;
  double y = 0.0;
};

// Axes are 1-based.
std::vector<ModalityPoint> modality_coordinates(const McaResult& result, std::size_t axis_x,
                                                std::size_t axis_y);

std::string export_modality_coordinates(const McaResult& result, char delimiter = ',');
std::string export_eigenvalues(const McaResult& result, char delimiter = ',');

}  // namespace unemap
