#include "skmm/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace skmm {
namespace {

static_assert(std::endian::native == std::endian::little,
              "matrix container assumes a little-endian host");

constexpr char kMagic[4] = {'S', 'K', 'M', 'M'};

[[noreturn]] void fail(const std::string& what, const std::string& path) {
    throw std::runtime_error(what + ": " + path);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

DenseMatrix read_csv(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) fail("empty csv file", path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    if (header.empty() || header.front().rfind("col_", 0) != 0)
        fail("csv header must start with col_0", path);
    const std::size_t cols = header.size();

    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != cols) fail("csv row width mismatch", path);
        for (const auto& f : fields) {
            std::size_t used = 0;
            const double v = std::stod(f, &used);
            if (used == 0) fail("csv field is not numeric", path);
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) fail("csv file has no data rows", path);
    DenseMatrix m(rows, cols);
    std::memcpy(m.data(), values.data(), values.size() * sizeof(double));
    return m;
}

}  // namespace

void write_matrix(const std::string& path, const DenseMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open for writing", path);
    out.write(kMagic, 4);
    const std::uint16_t version = kMatrixFormatVersion;
    const std::uint64_t rows = m.rows();
    const std::uint64_t cols = m.cols();
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
    out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!out) fail("write failed", path);
}

DenseMatrix read_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open for reading", path);
    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0) {
        std::uint16_t version = 0;
        std::uint64_t rows = 0, cols = 0;
        in.read(reinterpret_cast<char*>(&version), sizeof(version));
        in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
        in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
        if (!in) fail("truncated matrix header", path);
        if (version != kMatrixFormatVersion) fail("unsupported matrix version", path);
        if (rows == 0 || cols == 0) fail("matrix file has empty shape", path);
        if (rows > (1ULL << 32) || cols > (1ULL << 32) ||
            rows * cols > (1ULL << 34))
            fail("matrix file shape is implausibly large", path);
        DenseMatrix m(rows, cols);
        in.read(reinterpret_cast<char*>(m.data()),
                static_cast<std::streamsize>(m.size() * sizeof(double)));
        if (static_cast<std::size_t>(in.gcount()) != m.size() * sizeof(double))
            fail("truncated matrix payload", path);
        return m;
    }
    in.clear();
    in.seekg(0);
    return read_csv(in, path);
}

void write_vector(const std::string& path, const std::vector<double>& v) {
    DenseMatrix m(v.size(), 1);
    std::memcpy(m.data(), v.data(), v.size() * sizeof(double));
    write_matrix(path, m);
}

std::vector<double> read_vector(const std::string& path) {
    DenseMatrix m = read_matrix(path);
    if (m.cols() != 1 && m.rows() != 1) fail("expected a single-column file", path);
    return std::vector<double>(m.data(), m.data() + m.size());
}

ordered_json selection_json(const Selection& sel) {
    ordered_json j;
    j["method"] = sel.method;
    j["n"] = sel.indices.size();
    j["seed"] = sel.seed;
    j["indices"] = sel.indices;
    if (sel.weights) j["weights"] = sel.weights->values;
    if (!sel.objective_trace.empty()) {
        ordered_json trace = ordered_json::array();
        for (const auto& [it, val] : sel.objective_trace)
            trace.push_back(ordered_json::array({it, val}));
        j["objective_trace"] = std::move(trace);
    }
    j["config"] = ordered_json{{"sampling_mode", sel.sampling_mode}, {"padded", sel.padded}};
    return j;
}

Selection selection_from_json(const ordered_json& j) {
    Selection sel;
    sel.method = j.at("method").get<std::string>();
    sel.seed = j.at("seed").get<std::uint64_t>();
    sel.indices = j.at("indices").get<std::vector<std::size_t>>();
    if (j.contains("weights")) {
        SelectionWeights w;
        w.values = j["weights"].get<std::vector<double>>();
        w.budget = j.at("n").get<std::size_t>();
        sel.weights = std::move(w);
    }
    if (j.contains("objective_trace"))
        for (const auto& pair : j["objective_trace"])
            sel.objective_trace.emplace_back(pair.at(0).get<std::size_t>(),
                                             pair.at(1).get<double>());
    if (j.contains("config")) {
        const auto& cfg = j["config"];
        if (cfg.contains("sampling_mode")) sel.sampling_mode = cfg["sampling_mode"];
        if (cfg.contains("padded")) sel.padded = cfg["padded"];
    }
    return sel;
}

ordered_json eval_report_json(const EvalReport& report) {
    ordered_json j;
    j["empirical_risk"] = report.empirical_risk;
    j["chosen_alpha"] = report.chosen_alpha;
    ordered_json grid = ordered_json::array();
    for (const auto& [alpha, loss] : report.cv_grid)
        grid.push_back(ordered_json::array({alpha, loss}));
    j["cv_grid"] = std::move(grid);
    if (report.trace_sigma) j["trace_sigma"] = *report.trace_sigma;
    if (report.diagnostics) {
        const auto& d = *report.diagnostics;
        j["diagnostics"] = ordered_json{{"variance_term", d.variance_term},
                                        {"spectral_term", d.spectral_term},
                                        {"gamma_s", d.gamma_s},
                                        {"intrinsic_dim", d.intrinsic_dim},
                                        {"moment_condition", d.moment_condition},
                                        {"min_q_over_lambda", d.min_q_over_lambda}};
    }
    return j;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open for reading", path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open for writing", path);
    out << text;
    if (!out) fail("write failed", path);
}

}  // namespace skmm
