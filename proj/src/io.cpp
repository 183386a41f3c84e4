#include "pwaq/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pwaq/errors.hpp"

namespace pwaq {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json matrix_to_json(const Mat& M) {
  json rows = json::array();
  for (int r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(row);
  }
  return rows;
}

Mat matrix_from_json(const json& j) {
  if (!j.is_array())
    throw ValidationError("matrix: expected an array of rows");
  const int rows = static_cast<int>(j.size());
  if (rows == 0) return Mat(0, 0);
  const int cols = static_cast<int>(j[0].size());
  Mat M(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols)
      throw ValidationError("matrix: ragged rows");
    for (int c = 0; c < cols; ++c) M(r, c) = j[r][c].get<double>();
  }
  return M;
}

json vector_to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vector_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("vector: expected an array");
  Vec v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

namespace {

HPolytope polytope_from_json(const json& j, int dim) {
  Mat U = j.contains("U") ? matrix_from_json(j.at("U")) : Mat(0, dim);
  Vec v = j.contains("v") ? vector_from_json(j.at("v")) : Vec(0);
  if (U.rows() == 0) U = Mat(0, dim);
  return HPolytope(U, v);
}

json polytope_to_json(const HPolytope& p) {
  return json{{"U", matrix_to_json(p.U)}, {"v", vector_to_json(p.v)}};
}

}  // namespace

SystemBundle system_from_json(const json& j) {
  SystemBundle b;
  try {
    b.sys.state_dim = j.at("state_dim").get<int>();
    b.sys.input_dim = j.at("input_dim").get<int>();
    b.sys.disturbance_dim = j.value("disturbance_dim", 0);
    b.sys.total_space =
        polytope_from_json(j.at("total_space"), b.sys.state_dim);
    for (const json& cj : j.at("cells")) {
      Cell c;
      c.region = polytope_from_json(cj, b.sys.state_dim);
      c.A = matrix_from_json(cj.at("A"));
      c.B = matrix_from_json(cj.at("B"));
      c.f = cj.contains("f") ? vector_from_json(cj.at("f"))
                             : Vec::Zero(b.sys.state_dim);
      c.D = cj.contains("D")
                ? matrix_from_json(cj.at("D"))
                : Mat::Zero(b.sys.state_dim, b.sys.disturbance_dim);
      if (c.D.cols() == 0 && b.sys.disturbance_dim > 0)
        c.D = Mat::Zero(b.sys.state_dim, b.sys.disturbance_dim);
      b.sys.cells.push_back(c);
    }
    if (j.contains("controller")) {
      AffineController ctrl;
      for (const json& gj : j.at("controller")) {
        AffineController::Gain g;
        g.K = matrix_from_json(gj.at("K"));
        g.g = gj.contains("g") ? vector_from_json(gj.at("g"))
                               : Vec::Zero(b.sys.input_dim);
        ctrl.gains.push_back(g);
      }
      b.ctrl = ctrl;
    }
    if (j.contains("quantizer")) {
      UniformQuantizer q;
      q.delta = j.at("quantizer").at("delta").get<double>();
      q.M = j.at("quantizer").at("M").get<double>();
      if (!(q.M > q.delta && q.delta > 0))
        throw ValidationError("quantizer: require M > delta > 0");
      b.quant = q;
    }
    if (j.contains("input_polytope")) {
      InputPolytope u;
      u.R = matrix_from_json(j.at("input_polytope").at("R"));
      u.r = vector_from_json(j.at("input_polytope").at("r"));
      b.input = u;
    }
    if (j.contains("certificate")) {
      std::vector<Mat> P;
      for (const json& pj : j.at("certificate").at("P"))
        P.push_back(matrix_from_json(pj));
      b.P = P;
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("system file: ") + e.what());
  }
  validate_system(b.sys);
  if (b.ctrl) validate_controller(b.sys, *b.ctrl);
  return b;
}

SystemBundle load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open system file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("system file parse: ") + e.what());
  }
  return system_from_json(j);
}

json system_to_json(const SystemBundle& b) {
  json j;
  j["schema"] = "pwaq-system-v1";
  j["state_dim"] = b.sys.state_dim;
  j["input_dim"] = b.sys.input_dim;
  j["disturbance_dim"] = b.sys.disturbance_dim;
  j["total_space"] = polytope_to_json(b.sys.total_space);
  json cells = json::array();
  for (const Cell& c : b.sys.cells) {
    json cj = polytope_to_json(c.region);
    cj["A"] = matrix_to_json(c.A);
    cj["B"] = matrix_to_json(c.B);
    cj["f"] = vector_to_json(c.f);
    if (c.D.cols() > 0) cj["D"] = matrix_to_json(c.D);
    cells.push_back(cj);
  }
  j["cells"] = cells;
  if (b.ctrl) {
    json gains = json::array();
    for (const auto& g : b.ctrl->gains)
      gains.push_back(
          json{{"K", matrix_to_json(g.K)}, {"g", vector_to_json(g.g)}});
    j["controller"] = gains;
  }
  if (b.quant)
    j["quantizer"] = json{{"delta", b.quant->delta}, {"M", b.quant->M}};
  if (b.input)
    j["input_polytope"] = json{{"R", matrix_to_json(b.input->R)},
                               {"r", vector_to_json(b.input->r)}};
  if (b.P) {
    json ps = json::array();
    for (const Mat& P : *b.P) ps.push_back(matrix_to_json(P));
    j["certificate"] = json{{"P", ps}};
  }
  return j;
}

ControllerArtifact load_artifact(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open artifact: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("artifact parse: ") + e.what());
  }
  ControllerArtifact a;
  try {
    for (const json& gj : j.at("controller")) {
      AffineController::Gain g;
      g.K = matrix_from_json(gj.at("K"));
      g.g = vector_from_json(gj.at("g"));
      a.ctrl.gains.push_back(g);
    }
    for (const json& pj : j.at("P")) a.P.push_back(matrix_from_json(pj));
    if (j.contains("meta")) a.meta = j.at("meta");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("artifact: ") + e.what());
  }
  return a;
}

void save_artifact(const ControllerArtifact& a, const std::string& path) {
  json j;
  j["schema"] = "pwaq-controller-v1";
  json gains = json::array();
  for (const auto& g : a.ctrl.gains)
    gains.push_back(
        json{{"K", matrix_to_json(g.K)}, {"g", vector_to_json(g.g)}});
  j["controller"] = gains;
  json ps = json::array();
  for (const Mat& P : a.P) ps.push_back(matrix_to_json(P));
  j["P"] = ps;
  if (!a.meta.is_null()) j["meta"] = a.meta;
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write artifact: " + path);
  out << j.dump(2) << "\n";
}

void trace_to_csv(const Trace& tr, std::ostream& os) {
  if (tr.steps.empty()) {
    os << "k,mode,mu\n";
    return;
  }
  const int n = static_cast<int>(tr.steps.front().x.size());
  const int m = static_cast<int>(tr.steps.front().u.size());
  const int nq = static_cast<int>(tr.steps.front().q.size());
  os << "k,mode";
  for (int i = 0; i < n; ++i) os << ",x" << i;
  for (int i = 0; i < m; ++i) os << ",u" << i;
  os << ",mu";
  for (int i = 0; i < nq; ++i) os << ",q" << i;
  os << ",zoom_event,requantized,saturation\n";
  for (const StepRecord& r : tr.steps) {
    os << r.k << "," << (r.mode + 1);
    for (int i = 0; i < n; ++i) os << "," << format_double(r.x[i]);
    for (int i = 0; i < m; ++i) os << "," << format_double(r.u[i]);
    os << "," << format_double(r.mu);
    for (int i = 0; i < nq; ++i) os << "," << format_double(r.q[i]);
    os << "," << (r.zoom_event ? 1 : 0) << "," << (r.requantized ? 1 : 0)
       << "," << (r.saturation ? 1 : 0) << "\n";
  }
}

void trace_to_csv_file(const Trace& tr, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write csv: " + path);
  trace_to_csv(tr, out);
}

namespace {

struct SvgMapper {
  double xmin, xmax, ymin, ymax;
  static constexpr double W = 640, H = 640, pad = 20;
  double sx(double x) const {
    return pad + (x - xmin) / (xmax - xmin) * (W - 2 * pad);
  }
  double sy(double y) const {
    return H - pad - (y - ymin) / (ymax - ymin) * (H - 2 * pad);
  }
};

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

void svg_plot(const PwaSystem& sys, const Trace& tr, const std::string& path) {
  if (sys.state_dim != 2)
    throw ValidationError("svg: plotting is limited to 2-D systems");
  const auto [lo, hi] = bounding_box(sys.total_space);
  SvgMapper M{lo[0], hi[0], lo[1], hi[1]};

  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write svg: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << SvgMapper::W
      << "\" height=\"" << SvgMapper::H << "\" viewBox=\"0 0 " << SvgMapper::W
      << " " << SvgMapper::H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // cells as polygons, vertices ordered by angle around the centroid
  for (const Cell& c : sys.cells) {
    VertexList vl;
    try {
      vl = vertices(c.region);
    } catch (const Error&) {
      continue;
    }
    if (vl.vertices.size() < 3) continue;
    Vec centroid = Vec::Zero(2);
    for (const Vec& v : vl.vertices) centroid += v;
    centroid /= static_cast<double>(vl.vertices.size());
    std::vector<Vec> ordered = vl.vertices;
    std::sort(ordered.begin(), ordered.end(), [&](const Vec& a, const Vec& b) {
      return std::atan2(a[1] - centroid[1], a[0] - centroid[0]) <
             std::atan2(b[1] - centroid[1], b[0] - centroid[0]);
    });
    out << "<polygon points=\"";
    for (const Vec& v : ordered)
      out << fmt2(M.sx(v[0])) << "," << fmt2(M.sy(v[1])) << " ";
    out << "\" fill=\"#f2f2f2\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  }

  if (!tr.steps.empty()) {
    out << "<polyline points=\"";
    for (const StepRecord& r : tr.steps)
      out << fmt2(M.sx(r.x[0])) << "," << fmt2(M.sy(r.x[1])) << " ";
    out << fmt2(M.sx(tr.x_final[0])) << "," << fmt2(M.sy(tr.x_final[1]));
    out << "\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n";
    out << "<circle cx=\"" << fmt2(M.sx(tr.steps.front().x[0])) << "\" cy=\""
        << fmt2(M.sy(tr.steps.front().x[1]))
        << "\" r=\"4\" fill=\"#2980b9\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace pwaq
