#include "divpot/serialize.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "divpot/csv.hpp"
#include "divpot/errors.hpp"

namespace divpot {

void write_matrix_csv(std::ostream& out, const std::vector<std::string>& tickers, const Eigen::MatrixXd& values) {
  for (const auto& t : tickers) out << ',' << csv::escape(t);
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    out << csv::escape(tickers[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < values.cols(); ++j) out << ',' << csv::format_number(values(i, j));
    out << '\n';
  }
}

LabeledValues read_matrix_csv(std::istream& in, const std::string& name) {
  LabeledValues m;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = csv::split_line(line, name, line_no);
    if (m.tickers.empty()) {
      if (fields.size() < 2 || !fields[0].empty()) throw ParseError(name, line_no, "expected ',T1,...,Tp' header");
      m.tickers.assign(fields.begin() + 1, fields.end());
      continue;
    }
    if (fields.size() != m.tickers.size() + 1) {
      throw ParseError(name, line_no, "expected " + std::to_string(m.tickers.size() + 1) + " fields");
    }
    if (fields[0] != m.tickers[rows.size()]) {
      throw ParseError(name, line_no, "row label '" + fields[0] + "' does not match column '" + m.tickers[rows.size()] + "'");
    }
    std::vector<double> row;
    for (std::size_t j = 1; j < fields.size(); ++j) row.push_back(csv::parse_number(fields[j], name, line_no));
    rows.push_back(std::move(row));
    if (rows.size() > m.tickers.size()) throw ParseError(name, line_no, "more rows than columns");
  }
  if (m.tickers.empty() || rows.size() != m.tickers.size()) {
    throw ParseError(name, line_no, "matrix is not square");
  }
  const auto p = static_cast<Eigen::Index>(rows.size());
  m.values.resize(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) m.values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

void write_spectrum_csv(std::ostream& out, const std::vector<std::string>& tickers, const Spectrum& spectrum) {
  const auto p = spectrum.eigenvalues.size();
  for (Eigen::Index k = 0; k < p; ++k) out << ",PC" << (k + 1);
  out << "\neigenvalue";
  for (Eigen::Index k = 0; k < p; ++k) out << ',' << csv::format_number(spectrum.eigenvalues(k));
  out << '\n';
  for (Eigen::Index i = 0; i < p; ++i) {
    out << csv::escape(tickers[static_cast<std::size_t>(i)]);
    for (Eigen::Index k = 0; k < p; ++k) out << ',' << csv::format_number(spectrum.eigenvectors(i, k));
    out << '\n';
  }
}

nlohmann::json to_json(const SelectionResult& result) {
  return {{"retained", result.retained},
          {"rounds", result.rounds},
          {"deleted_per_round", result.deleted_per_round},
          {"final_min_eigenvalue", result.final_min_eigenvalue}};
}

void write_prices_csv(std::ostream& out, const StockPanel& panel) {
  out << "date,ticker,close\n";
  for (std::size_t t = 0; t < panel.num_dates(); ++t) {
    const std::string date = panel.dates()[t].to_string();
    for (std::size_t j = 0; j < panel.num_tickers(); ++j) {
      if (!panel.has_price(t, j)) continue;
      out << date << ',' << csv::escape(panel.tickers()[j]) << ','
          << csv::format_number(panel.close()(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j))) << '\n';
    }
  }
}

void write_dividends_csv(std::ostream& out, const StockPanel& panel) {
  out << "date,ticker,amount\n";
  for (std::size_t t = 0; t < panel.num_dates(); ++t) {
    for (std::size_t j = 0; j < panel.num_tickers(); ++j) {
      const double d = panel.dividend()(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j));
      if (d > 0.0) {
        out << panel.dates()[t].to_string() << ',' << csv::escape(panel.tickers()[j]) << ',' << csv::format_number(d)
            << '\n';
      }
    }
  }
}

}  // namespace divpot
