#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "skmm/evaluator.hpp"
#include "skmm/matrix.hpp"
#include "skmm/selectors.hpp"

namespace skmm {

using ordered_json = nlohmann::ordered_json;

// Binary matrix container: "SKMM" magic, u16 version, u64 rows, u64 cols,
// row-major binary64 payload, all little-endian. read_matrix also accepts CSV
// with a "col_0,col_1,..." header.
inline constexpr std::uint16_t kMatrixFormatVersion = 1;

void write_matrix(const std::string& path, const DenseMatrix& m);
DenseMatrix read_matrix(const std::string& path);

void write_vector(const std::string& path, const std::vector<double>& v);
std::vector<double> read_vector(const std::string& path);

// Core schema: method, n, seed, indices, weights?, objective_trace?, config.
// Callers may merge extra keys into "config" before dumping.
ordered_json selection_json(const Selection& sel);
Selection selection_from_json(const ordered_json& j);

ordered_json eval_report_json(const EvalReport& report);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace skmm
