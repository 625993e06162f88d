#include "certeq/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace certeq {

namespace {

using nlohmann::json;

Mat parse_matrix(const json& j, const std::string& key) {
    if (!j.is_array() || j.empty()) {
        throw SchemaError("key \"" + key + "\": expected a non-empty array of rows");
    }
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    Mat m;
    for (std::size_t i = 0; i < rows; ++i) {
        const json& row = j[i];
        if (!row.is_array() || row.empty()) {
            throw SchemaError("key \"" + key + "\", row " + std::to_string(i) +
                              ": expected a non-empty array of numbers");
        }
        if (i == 0) {
            cols = row.size();
            m.resize(rows, cols);
        } else if (row.size() != cols) {
            throw SchemaError("key \"" + key + "\", row " + std::to_string(i) +
                              ": ragged row length");
        }
        for (std::size_t k = 0; k < cols; ++k) {
            if (!row[k].is_number()) {
                throw SchemaError("key \"" + key + "\", entry (" + std::to_string(i) + "," +
                                  std::to_string(k) + "): expected a number");
            }
            m(i, k) = row[k].get<double>();
        }
    }
    if (!m.allFinite()) throw SchemaError("key \"" + key + "\": entries must be finite");
    return m;
}

double parse_scalar(const json& j, const std::string& key) {
    if (!j.is_number()) throw SchemaError("key \"" + key + "\": expected a number");
    return j.get<double>();
}

}  // namespace

CostParams SystemFile::cost_params() const {
    const Eigen::Index n = A.rows();
    const Eigen::Index d = B.cols();
    return CostParams(Q.value_or(Mat::Identity(n, n)), R.value_or(Mat::Identity(d, d)));
}

LQGSystem SystemFile::lqg_system() const {
    if (!C) throw SchemaError("key \"C\": required for a partially observed system");
    const Eigen::Index n = A.rows();
    const Eigen::Index d = B.cols();
    const Eigen::Index p = C->rows();
    return LQGSystem(A, B, *C,
                     W.value_or(sigma_w * sigma_w * Mat::Identity(n, n)),
                     V.value_or(sigma_v * sigma_v * Mat::Identity(p, p)),
                     Q.value_or(Mat::Identity(p, p)),
                     R.value_or(Mat::Identity(d, d)));
}

SystemFile parse_system_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(std::string("JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("top level: expected a JSON object");

    SystemFile f;
    if (!j.contains("A")) throw SchemaError("key \"A\": missing");
    if (!j.contains("B")) throw SchemaError("key \"B\": missing");
    f.A = parse_matrix(j["A"], "A");
    f.B = parse_matrix(j["B"], "B");
    if (j.contains("C")) f.C = parse_matrix(j["C"], "C");
    if (j.contains("Q")) f.Q = parse_matrix(j["Q"], "Q");
    if (j.contains("R")) f.R = parse_matrix(j["R"], "R");
    if (j.contains("W")) f.W = parse_matrix(j["W"], "W");
    if (j.contains("V")) f.V = parse_matrix(j["V"], "V");
    if (j.contains("sigma_w")) f.sigma_w = parse_scalar(j["sigma_w"], "sigma_w");
    if (j.contains("sigma_v")) f.sigma_v = parse_scalar(j["sigma_v"], "sigma_v");

    static const char* known[] = {"A", "B", "C", "Q", "R", "W", "V", "sigma_w", "sigma_v"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw SchemaError("key \"" + it.key() + "\": unknown key");
    }

    if (f.A.rows() != f.A.cols()) throw SchemaError("key \"A\": must be square");
    if (f.B.rows() != f.A.rows()) throw SchemaError("key \"B\": row count must match A");
    return f;
}

SystemFile load_system_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_system_json(ss.str());
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvWriter::metadata(const std::string& key, const std::string& value) {
    out_ << "# " << key << " = " << value << "\n";
}

void CsvWriter::metadata(const std::string& key, double value) {
    metadata(key, format_double(value));
}

void CsvWriter::header(const std::vector<std::string>& columns) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out_ << (i ? "," : "") << columns[i];
    }
    out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out_ << (i ? "," : "") << cells[i];
    }
    out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double v : cells) s.push_back(format_double(v));
    row(s);
}

}  // namespace certeq
