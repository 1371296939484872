#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "divpot/market_data.hpp"
#include "divpot/pca.hpp"
#include "divpot/selection.hpp"

namespace divpot {

/// Square CSV: header `,T1,...,Tp`, then one `Ti,v...` row per ticker.
void write_matrix_csv(std::ostream& out, const std::vector<std::string>& tickers, const Eigen::MatrixXd& values);

struct LabeledValues {
  std::vector<std::string> tickers;
  Eigen::MatrixXd values;
};

/// Inverse of write_matrix_csv. Throws ParseError on ragged or mislabelled input.
LabeledValues read_matrix_csv(std::istream& in, const std::string& name = "matrix");

/// Header `,PC1,...,PCp`, an `eigenvalue` row, then one loading row per ticker.
void write_spectrum_csv(std::ostream& out, const std::vector<std::string>& tickers, const Spectrum& spectrum);

nlohmann::json to_json(const SelectionResult& result);

/// `date,ticker,close` rows for every present price.
void write_prices_csv(std::ostream& out, const StockPanel& panel);

/// `date,ticker,amount` rows for every nonzero dividend.
void write_dividends_csv(std::ostream& out, const StockPanel& panel);

}  // namespace divpot
