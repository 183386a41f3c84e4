#ifndef PWAQ_IO_HPP
#define PWAQ_IO_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pwaq/model.hpp"
#include "pwaq/runtime.hpp"

namespace pwaq {

/// Parsed system file: the PWA model plus whatever optional sections the
/// file carries.
struct SystemBundle {
  PwaSystem sys;
  std::optional<AffineController> ctrl;
  std::optional<UniformQuantizer> quant;
  std::optional<InputPolytope> input;
  std::optional<std::vector<Mat>> P;  // bundled certificate matrices
};

nlohmann::json matrix_to_json(const Mat& M);
Mat matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Vec& v);
Vec vector_from_json(const nlohmann::json& j);

/// Load and validate a system description. Throws ValidationError.
SystemBundle load_system(const std::string& path);
SystemBundle system_from_json(const nlohmann::json& j);
nlohmann::json system_to_json(const SystemBundle& b);

/// Controller artifact: gains plus certificate matrices.
struct ControllerArtifact {
  AffineController ctrl;
  std::vector<Mat> P;
  nlohmann::json meta;  // solver diagnostics, achieved constants
};

ControllerArtifact load_artifact(const std::string& path);
void save_artifact(const ControllerArtifact& a, const std::string& path);

/// Trace CSV: k, mode (1-based), x[..], u[..], mu, q[..], flags as 0/1.
/// Floats use the shortest round-trip decimal form.
void trace_to_csv(const Trace& tr, std::ostream& os);
void trace_to_csv_file(const Trace& tr, const std::string& path);

/// 2-D trajectory plot over the cell partition.
void svg_plot(const PwaSystem& sys, const Trace& tr, const std::string& path);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

}  // namespace pwaq

#endif
