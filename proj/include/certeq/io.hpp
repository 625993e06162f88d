#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "certeq/systems.hpp"

namespace certeq {

// Malformed or missing input file / unparsable JSON.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally valid JSON that violates the system-file schema; the message
// names the offending key.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// JSON description of a plant: required "A", "B"; optional "C", "Q", "R",
// "W", "V", "sigma_w", "sigma_v". Matrices are row-major arrays of arrays.
struct SystemFile {
    Mat A, B;
    std::optional<Mat> C, Q, R, W, V;
    double sigma_w = 1.0;
    double sigma_v = 1.0;

    LinearSystem linear_system() const { return LinearSystem(A, B); }
    // Q, R defaulting to identity when absent.
    CostParams cost_params() const;
    bool has_observation() const { return C.has_value(); }
    LQGSystem lqg_system() const;  // requires C; W, V default to sigma^2 I
};

SystemFile load_system_file(const std::string& path);
SystemFile parse_system_json(const std::string& text);

// Floats at 17 significant digits ("%.17g"), locale-independent.
std::string format_double(double v);

// CSV with "#"-prefixed metadata lines, one header row, UNIX newlines.
class CsvWriter {
  public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}
    void metadata(const std::string& key, const std::string& value);
    void metadata(const std::string& key, double value);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);
    void row(const std::vector<double>& cells);

  private:
    std::ostream& out_;
};

}  // namespace certeq
