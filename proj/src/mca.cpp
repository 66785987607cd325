#include "unemap/mca.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "unemap/errors.hpp"
#include "unemap/text_io.hpp"

namespace unemap {

CategoricalTable categorical_table(const CodedDataset& data, std::span<const Qual> variables) {
  CategoricalTable t;
  t.ids = data.ids;
  for (Qual v : variables) {
    t.variables.emplace_back(name_of(v));
    t.modalities.push_back(data.coding.modality_labels(v));
  }
  t.codes.reserve(data.size());
  for (const auto& m : data.modalities) {
    std::vector<int> row;
    for (Qual v : variables) row.push_back(m[static_cast<std::size_t>(v)]);
    t.codes.push_back(std::move(row));
  }
  return t;
}

IndicatorMatrix indicator(const CategoricalTable& table) {
  IndicatorMatrix ind;
  ind.variables = table.variables;
  if (table.modalities.size() != table.variables.size())
    throw DimensionError("modality lists do not match the variables");
  std::vector<std::size_t> offset;
  for (std::size_t v = 0; v < table.variables.size(); ++v) {
    offset.push_back(ind.columns.size());
    for (const auto& m : table.modalities[v]) ind.columns.push_back({v, m});
  }
  ind.z = Matrix(table.codes.size(), ind.columns.size());
  ind.column_counts.assign(ind.columns.size(), 0);
  for (std::size_t i = 0; i < table.codes.size(); ++i) {
    const auto& row = table.codes[i];
    const std::string who = i < table.ids.size() ? table.ids[i] : std::to_string(i);
    if (row.size() != table.variables.size())
      throw DimensionError("record " + who + " has " + std::to_string(row.size()) +
                           " values, expected " + std::to_string(table.variables.size()));
    for (std::size_t v = 0; v < row.size(); ++v) {
      const int code = row[v];
      if (code < 0 || static_cast<std::size_t>(code) >= table.modalities[v].size())
        throw DomainError("record " + who + ": unknown modality for " + table.variables[v]);
      const std::size_t col = offset[v] + static_cast<std::size_t>(code);
      ind.z(i, col) = 1.0;
      ++ind.column_counts[col];
    }
  }
  return ind;
}

McaResult fit_mca(const IndicatorMatrix& indicator, std::size_t axes) {
  const std::size_t n = indicator.n();
  const std::size_t q = indicator.q();
  if (n < 2) throw DomainError("MCA needs at least 2 records");
  if (q < 1) throw DomainError("MCA needs at least one variable");

  McaResult r;
  r.variables = indicator.variables;
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < indicator.j(); ++j) {
    if (indicator.column_counts[j] == 0) {
      const auto& c = indicator.columns[j];
      r.warnings.push_back("dropping empty modality " + indicator.variables[c.variable] + "=" +
                           c.modality);
      continue;
    }
    keep.push_back(j);
    r.columns.push_back(indicator.columns[j]);
  }
  const std::size_t jj = keep.size();
  const std::size_t dims = jj - q;
  if (axes < 1 || axes > dims)
    throw DomainError("requested " + std::to_string(axes) + " axes; at most J-Q = " +
                      std::to_string(dims) + " available");
  r.axes = axes;

  const double nd = static_cast<double>(n);
  const double qd = static_cast<double>(q);
  r.masses.resize(jj);
  for (std::size_t a = 0; a < jj; ++a)
    r.masses[a] = static_cast<double>(indicator.column_counts[keep[a]]) / (nd * qd);

  // Burt matrix of the kept columns.
  Eigen::MatrixXd z(n, jj);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < jj; ++a) z(i, a) = indicator.z(i, keep[a]);
  const Eigen::MatrixXd burt = z.transpose() * z;

  // S'S for the standardized residual S = D_r^-1/2 (P - r c') D_c^-1/2.
  Eigen::MatrixXd sts(jj, jj);
  for (std::size_t a = 0; a < jj; ++a)
    for (std::size_t b = 0; b < jj; ++b) {
      const double cc = std::sqrt(r.masses[a] * r.masses[b]);
      sts(a, b) = burt(a, b) / (nd * qd * qd * cc) - cc;
    }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sts);
  if (es.info() != Eigen::Success) throw Error("MCA eigendecomposition failed");
  const Eigen::VectorXd& evals = es.eigenvalues();  // ascending
  const Eigen::MatrixXd& evecs = es.eigenvectors();

  const double total = (static_cast<double>(jj) - qd) / qd;
  for (std::size_t k = 0; k < dims; ++k) {
    const double l = std::max(0.0, evals(static_cast<Eigen::Index>(jj - 1 - k)));
    r.eigenvalues.push_back(l);
    r.inertia_share.push_back(total > 0 ? 100.0 * l / total : 0.0);
  }

  r.column_coordinates = Matrix(jj, axes);
  r.contributions = Matrix(jj, axes);
  r.row_coordinates = Matrix(n, axes);
  for (std::size_t k = 0; k < axes; ++k) {
    Eigen::VectorXd v = evecs.col(static_cast<Eigen::Index>(jj - 1 - k));
    for (std::size_t a = 0; a < jj; ++a) {
      const double g = v(static_cast<Eigen::Index>(a)) / std::sqrt(r.masses[a]);
      if (std::abs(g) > 1e-10) {
        if (g < 0) v = -v;
        break;
      }
    }
    const double sigma = std::sqrt(r.eigenvalues[k]);
    double centering = 0.0;
    for (std::size_t a = 0; a < jj; ++a) {
      const double vk = v(static_cast<Eigen::Index>(a));
      r.column_coordinates(a, k) = vk * sigma / std::sqrt(r.masses[a]);
      r.contributions(a, k) = r.eigenvalues[k] > 0 ? vk * vk : 0.0;
      centering += std::sqrt(r.masses[a]) * vk;
    }
    // f_ik = sum_j (z_ij / Q - c_j) v_jk / sqrt(c_j)
    for (std::size_t i = 0; i < n; ++i) {
      double f = 0.0;
      for (std::size_t a = 0; a < jj; ++a)
        if (z(i, a) != 0.0) f += v(static_cast<Eigen::Index>(a)) / std::sqrt(r.masses[a]);
      r.row_coordinates(i, k) = f / qd - centering;
    }
  }
  return r;
}

std::vector<ModalityPoint> modality_coordinates(const McaResult& result, std::size_t axis_x,
                                                std::size_t axis_y) {
  for (std::size_t a : {axis_x, axis_y})
    if (a < 1 || a > result.axes)
      throw DomainError("axis " + std::to_string(a) + " outside 1.." + std::to_string(result.axes));
  std::vector<ModalityPoint> out;
  for (std::size_t j = 0; j < result.columns.size(); ++j)
    out.push_back({result.variables[result.columns[j].variable], result.columns[j].modality,
                   result.column_coordinates(j, axis_x - 1), result.column_coordinates(j, axis_y - 1)});
  return out;
}

std::string export_modality_coordinates(const McaResult& result, char delimiter) {
  const std::string d(1, delimiter);
  std::string out = "variable" + d + "modality";
  for (std::size_t k = 1; k <= result.axes; ++k) out += d + "axis_" + std::to_string(k);
  out += d + "mass";
  for (std::size_t k = 1; k <= result.axes; ++k) out += d + "contribution_" + std::to_string(k);
  out += '\n';
  for (std::size_t j = 0; j < result.columns.size(); ++j) {
    out += text::quote_field(result.variables[result.columns[j].variable], delimiter) + d +
           text::quote_field(result.columns[j].modality, delimiter);
    for (std::size_t k = 0; k < result.axes; ++k)
      out += d + text::format_double(result.column_coordinates(j, k));
    out += d + text::format_double(result.masses[j]);
    for (std::size_t k = 0; k < result.axes; ++k)
      out += d + text::format_double(result.contributions(j, k));
    out += '\n';
  }
  return out;
}

std::string export_eigenvalues(const McaResult& result, char delimiter) {
  const std::string d(1, delimiter);
  std::string out = "axis" + d + "eigenvalue" + d + "inertia_pct" + d + "cumulative_pct\n";
  double cum = 0.0;
  for (std::size_t k = 0; k < result.eigenvalues.size(); ++k) {
    cum += result.inertia_share[k];
    out += std::to_string(k + 1) + d + text::format_double(result.eigenvalues[k]) + d +
           text::format_double(result.inertia_share[k]) + d + text::format_double(cum) + '\n';
  }
  return out;
}

}  // namespace unemap
