#pragma once

#include <cstdio>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "poselift/basis.hpp"
#include "poselift/camera.hpp"
#include "poselift/eval.hpp"
#include "poselift/lifter.hpp"
#include "poselift/skeleton.hpp"

namespace poselift {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

namespace io_detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << content;
}

inline json parse_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& err) {
    throw ParseError(path + ": " + err.what());
  }
}

inline double to_finite(const json& value, const std::string& where) {
  if (!value.is_number()) throw ParseError(where + ": expected a number");
  const double d = value.get<double>();
  if (!std::isfinite(d)) throw ParseError(where + ": non-finite value");
  return d;
}

// %.17g guarantees that doubles survive a CSV round trip.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& text, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || (end && *end != '\0' && *end != '\r'))
    throw ParseError(where + ": not a number: '" + text + "'");
  if (!std::isfinite(v)) throw ParseError(where + ": non-finite value");
  return v;
}

// FNV-1a 64 over the file bytes, as a hex string.
inline std::string digest(const std::string& path) {
  const std::string bytes = read_file(path);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace io_detail

// --- pose files --------------------------------------------------------------

struct PoseFileContent {
  std::vector<Pose3D> poses3d;
  std::vector<Pose2D> poses2d;
  std::vector<int> labels;  // optional CSV "label" column; empty if absent

  bool is_3d() const { return !poses3d.empty(); }
};

namespace io_detail {

// Maps a possibly permuted joint-name list onto canonical indices.
inline std::array<int, kJointCount> joint_permutation(
    const std::vector<std::string>& names, const std::string& where) {
  if (names.size() != kJointCount)
    throw ParseError(where + ": expected " + std::to_string(kJointCount) +
                     " joints, got " + std::to_string(names.size()));
  std::array<int, kJointCount> canon_of{};
  std::array<bool, kJointCount> seen{};
  for (int i = 0; i < kJointCount; ++i) {
    int idx;
    try {
      idx = JointSchema::index(names[i]);
    } catch (const SchemaError& err) {
      throw ParseError(where + ": " + err.what());
    }
    if (seen[idx]) throw ParseError(where + ": duplicate joint " + names[i]);
    seen[idx] = true;
    canon_of[i] = idx;
  }
  return canon_of;
}

inline PoseFileContent parse_pose_json(const std::string& path) {
  const json doc = parse_json(path);
  if (!doc.is_object()) throw ParseError(path + ": expected a JSON object");
  std::array<int, kJointCount> perm;
  for (int i = 0; i < kJointCount; ++i) perm[i] = i;
  if (doc.contains("joints")) {
    std::vector<std::string> names;
    for (const auto& j : doc["joints"]) names.push_back(j.get<std::string>());
    perm = joint_permutation(names, path);
  }
  PoseFileContent out;
  if (doc.contains("pose3d")) {
    const auto& arr = doc["pose3d"];
    if (arr.size() != kPose3Size)
      throw ParseError(path + ": pose3d expects " +
                       std::to_string(kPose3Size) + " floats, got " +
                       std::to_string(arr.size()));
    Pose3D p;
    for (int i = 0; i < kJointCount; ++i)
      for (int c = 0; c < 3; ++c)
        p[3 * perm[i] + c] = to_finite(arr[3 * i + c], path + ": pose3d");
    out.poses3d.push_back(p);
  } else if (doc.contains("pose2d")) {
    const auto& arr = doc["pose2d"];
    if (arr.size() != kPose2Size)
      throw ParseError(path + ": pose2d expects " +
                       std::to_string(kPose2Size) + " floats, got " +
                       std::to_string(arr.size()));
    Pose2D p;
    for (int i = 0; i < kJointCount; ++i)
      for (int c = 0; c < 2; ++c)
        p[2 * perm[i] + c] = to_finite(arr[2 * i + c], path + ": pose2d");
    out.poses2d.push_back(p);
  } else {
    throw ParseError(path + ": no pose3d or pose2d field");
  }
  return out;
}

inline PoseFileContent parse_pose_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);

  // columns are joint-coordinate names such as Lknee_z, plus optional label
  struct Column {
    int joint = -1;
    int coord = -1;  // 0 x, 1 y, 2 z
    bool label = false;
  };
  std::vector<Column> columns(header.size());
  int dims = 0;
  int label_col = -1;
  for (size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name == "label") {
      columns[c].label = true;
      label_col = static_cast<int>(c);
      continue;
    }
    const size_t sep = name.rfind('_');
    if (sep == std::string::npos || sep + 2 != name.size())
      throw ParseError(path + ": bad column name '" + name + "'");
    const char axis = name[sep + 1];
    const int coord = axis == 'x' ? 0 : axis == 'y' ? 1 : axis == 'z' ? 2 : -1;
    if (coord < 0) throw ParseError(path + ": bad column name '" + name + "'");
    int joint;
    try {
      joint = JointSchema::index(name.substr(0, sep));
    } catch (const SchemaError& err) {
      throw ParseError(path + ": " + err.what());
    }
    columns[c].joint = joint;
    columns[c].coord = coord;
    dims = std::max(dims, coord + 1);
  }
  const int expected = (dims == 3 ? kPose3Size : kPose2Size);
  const int pose_cols = static_cast<int>(header.size()) - (label_col >= 0 ? 1 : 0);
  if (pose_cols != expected)
    throw ParseError(path + ": expected " + std::to_string(expected) +
                     " coordinate columns, got " + std::to_string(pose_cols));
  {
    std::array<std::array<bool, 3>, kJointCount> seen{};
    for (const Column& col : columns) {
      if (col.label) continue;
      if (seen[col.joint][col.coord])
        throw ParseError(path + ": duplicate column for joint " +
                         JointSchema::names()[col.joint]);
      seen[col.joint][col.coord] = true;
    }
  }

  PoseFileContent out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    const std::string where = path + ":" + std::to_string(line_no);
    if (dims == 3) {
      Pose3D p;
      for (size_t c = 0; c < fields.size(); ++c) {
        if (columns[c].label) continue;
        p[3 * columns[c].joint + columns[c].coord] =
            parse_double(fields[c], where);
      }
      out.poses3d.push_back(p);
    } else {
      Pose2D p;
      for (size_t c = 0; c < fields.size(); ++c) {
        if (columns[c].label) continue;
        p[2 * columns[c].joint + columns[c].coord] =
            parse_double(fields[c], where);
      }
      out.poses2d.push_back(p);
    }
    if (label_col >= 0)
      out.labels.push_back(
          static_cast<int>(parse_double(fields[label_col], where)));
  }
  if (out.poses3d.empty() && out.poses2d.empty())
    throw ParseError(path + ": no pose rows");
  return out;
}

}  // namespace io_detail

inline PoseFileContent parse_pose_file(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
    return io_detail::parse_pose_csv(path);
  return io_detail::parse_pose_json(path);
}

inline Pose3D load_pose3d(const std::string& path) {
  const PoseFileContent content = parse_pose_file(path);
  if (content.poses3d.size() != 1)
    throw ParseError(path + ": expected exactly one 3D pose");
  return content.poses3d[0];
}

inline Pose2D load_pose2d(const std::string& path) {
  const PoseFileContent content = parse_pose_file(path);
  if (content.poses2d.size() != 1)
    throw ParseError(path + ": expected exactly one 2D pose");
  return content.poses2d[0];
}

inline void save_pose_json(const std::string& path, const Pose3D& pose) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["joints"] = JointSchema::names();
  doc["pose3d"] = std::vector<double>(pose.data(), pose.data() + kPose3Size);
  io_detail::write_file(path, doc.dump(2) + "\n");
}

inline void save_pose_json(const std::string& path, const Pose2D& pose) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["joints"] = JointSchema::names();
  doc["pose2d"] = std::vector<double>(pose.data(), pose.data() + kPose2Size);
  io_detail::write_file(path, doc.dump(2) + "\n");
}

inline void save_poses_csv(const std::string& path,
                           const std::vector<Pose3D>& poses,
                           const std::vector<int>& labels = {}) {
  std::ostringstream out;
  const auto& names = JointSchema::names();
  for (int j = 0; j < kJointCount; ++j) {
    if (j) out << ',';
    out << names[j] << "_x," << names[j] << "_y," << names[j] << "_z";
  }
  if (!labels.empty()) out << ",label";
  out << '\n';
  for (size_t r = 0; r < poses.size(); ++r) {
    for (int i = 0; i < kPose3Size; ++i) {
      if (i) out << ',';
      out << io_detail::format_double(poses[r][i]);
    }
    if (!labels.empty()) out << ',' << labels[r];
    out << '\n';
  }
  io_detail::write_file(path, out.str());
}

inline void save_poses_csv(const std::string& path,
                           const std::vector<Pose2D>& poses) {
  std::ostringstream out;
  const auto& names = JointSchema::names();
  for (int j = 0; j < kJointCount; ++j) {
    if (j) out << ',';
    out << names[j] << "_x," << names[j] << "_y";
  }
  out << '\n';
  for (const Pose2D& p : poses) {
    for (int i = 0; i < kPose2Size; ++i) {
      if (i) out << ',';
      out << io_detail::format_double(p[i]);
    }
    out << '\n';
  }
  io_detail::write_file(path, out.str());
}

// --- dictionaries, cameras, results ------------------------------------------

inline void save_basis(const std::string& path, const Basis& basis) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["method"] = basis_method_name(basis.method);
  doc["k"] = basis.count();
  doc["theta_learn"] = basis.theta_learn;
  doc["seed"] = basis.seed;
  doc["mu"] = std::vector<double>(basis.mean.data(),
                                  basis.mean.data() + kPose3Size);
  std::vector<double> b;
  b.reserve(static_cast<size_t>(kPose3Size) * basis.count());
  for (int r = 0; r < kPose3Size; ++r)
    for (int c = 0; c < basis.count(); ++c) b.push_back(basis.matrix(r, c));
  doc["B"] = b;
  io_detail::write_file(path, doc.dump() + "\n");
}

inline Basis load_basis(const std::string& path) {
  const json doc = io_detail::parse_json(path);
  Basis basis;
  try {
    basis.method = basis_method_from_name(doc.at("method").get<std::string>());
    const int k = doc.at("k").get<int>();
    if (k < 1) throw ParseError(path + ": k must be positive");
    basis.theta_learn = doc.value("theta_learn", 0.0);
    basis.seed = doc.value("seed", std::uint64_t{0});
    const auto& mu = doc.at("mu");
    if (mu.size() != kPose3Size)
      throw ParseError(path + ": mu expects " + std::to_string(kPose3Size) +
                       " floats");
    for (int i = 0; i < kPose3Size; ++i)
      basis.mean[i] = io_detail::to_finite(mu[i], path + ": mu");
    const auto& b = doc.at("B");
    if (static_cast<int>(b.size()) != kPose3Size * k)
      throw ParseError(path + ": B expects " +
                       std::to_string(kPose3Size * k) + " floats, got " +
                       std::to_string(b.size()));
    basis.matrix.resize(kPose3Size, k);
    for (int r = 0; r < kPose3Size; ++r)
      for (int c = 0; c < k; ++c)
        basis.matrix(r, c) =
            io_detail::to_finite(b[r * k + c], path + ": B");
  } catch (const json::exception& err) {
    throw ParseError(path + ": " + err.what());
  }
  return basis;
}

inline void save_camera(const std::string& path, const Camera& camera) {
  json doc;
  doc["m1"] = {camera.m1[0], camera.m1[1], camera.m1[2]};
  doc["m2"] = {camera.m2[0], camera.m2[1], camera.m2[2]};
  io_detail::write_file(path, doc.dump(2) + "\n");
}

inline Camera load_camera(const std::string& path) {
  const json doc = io_detail::parse_json(path);
  Camera cam;
  try {
    const auto& m1 = doc.at("m1");
    const auto& m2 = doc.at("m2");
    if (m1.size() != 3 || m2.size() != 3)
      throw ParseError(path + ": m1/m2 must hold 3 floats each");
    for (int i = 0; i < 3; ++i) {
      cam.m1[i] = io_detail::to_finite(m1[i], path + ": m1");
      cam.m2[i] = io_detail::to_finite(m2[i], path + ": m2");
    }
  } catch (const json::exception& err) {
    throw ParseError(path + ": " + err.what());
  }
  return cam;
}

inline void save_lift_result(const std::string& path, const LiftResult& result,
                             const Camera& camera,
                             const Eigen::Vector2d& image_center =
                                 Eigen::Vector2d::Zero()) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["alpha"] = std::vector<double>(
      result.alpha.values.data(),
      result.alpha.values.data() + result.alpha.values.size());
  doc["pose3d"] = std::vector<double>(result.pose.data(),
                                      result.pose.data() + kPose3Size);
  doc["residual_l1"] = result.residual_l1;
  doc["residual_l2"] = result.residual_l2;
  json viol = json::object();
  for (int i = 0; i < kLimbCount; ++i)
    viol[limb_names()[i]] = result.limb_violation[i];
  doc["limb_violation"] = viol;
  doc["iterations"] = {{"outer", result.outer_iterations},
                       {"inner", result.inner_iterations}};
  doc["converged"] = result.converged;
  doc["camera"] = {{"m1", {camera.m1[0], camera.m1[1], camera.m1[2]}},
                   {"m2", {camera.m2[0], camera.m2[1], camera.m2[2]}}};
  doc["image_center"] = {image_center[0], image_center[1]};
  io_detail::write_file(path, doc.dump(2) + "\n");
}

// --- config -------------------------------------------------------------------

struct Config {
  double theta = 0.1;
  double eta0 = 0.1;
  double eta_growth = 1.1;
  double eta_cap = 1e8;
  double delta0 = 1.0;
  double delta_growth = 1.02;
  double delta_cap = 1e8;
  int sdp_sweeps = 5;
  double projection_gain = 2.0;
  double tol_outer = 1e-6;
  double tol_inner = 1e-6;
  double constraint_tol = 1e-6;
  int max_outer = 300;
  int alternation_max = 20;
  double alternation_tol = 1e-4;
  double camera_tol = 1e-8;
  int camera_max_iterations = 300;
  std::string proportions_path;
  std::uint64_t seed = 0;

  void validate() const {
    if (theta < 0) throw DataError("config: theta must be nonnegative");
    for (double v : {eta0, eta_growth, eta_cap, delta0, delta_growth,
                     delta_cap, projection_gain, tol_outer, tol_inner,
                     constraint_tol, alternation_tol, camera_tol})
      if (!(v > 0))
        throw DataError("config: numeric fields must be positive");
    if (max_outer < 1 || alternation_max < 1 || camera_max_iterations < 1 ||
        sdp_sweeps < 1)
      throw DataError("config: iteration caps must be at least 1");
  }

  LiftOptions lift_options() const {
    LiftOptions o;
    o.eta0 = eta0;
    o.eta_growth = eta_growth;
    o.eta_cap = eta_cap;
    o.max_outer = max_outer;
    o.tol = tol_outer;
    o.constraint_tol = constraint_tol;
    o.sdp.delta0 = delta0;
    o.sdp.delta_growth = delta_growth;
    o.sdp.delta_cap = delta_cap;
    o.sdp.sweeps = sdp_sweeps;
    o.sdp.tol = tol_inner;
    o.sdp.projection_gain = projection_gain;
    return o;
  }

  AlternationOptions alternation_options() const {
    AlternationOptions o;
    o.max_outer = alternation_max;
    o.tol = alternation_tol;
    o.theta = theta;
    o.lift = lift_options();
    o.camera.tol = camera_tol;
    o.camera.max_iterations = camera_max_iterations;
    if (!proportions_path.empty()) {
      o.limbs = default_limbs(load_proportions(proportions_path));
    }
    return o;
  }

  static ProportionTable load_proportions(const std::string& path) {
    const json doc = io_detail::parse_json(path);
    ProportionTable table;
    for (const auto& [key, value] : doc.items()) {
      const double v = io_detail::to_finite(value, path + ": " + key);
      if (key == "upper_arm") table.upper_arm = v;
      else if (key == "lower_arm") table.lower_arm = v;
      else if (key == "upper_leg") table.upper_leg = v;
      else if (key == "lower_leg") table.lower_leg = v;
      else throw ParseError(path + ": unknown proportion key '" + key + "'");
    }
    try {
      table.validate();
    } catch (const DataError& err) {
      throw ParseError(path + ": " + err.what());
    }
    return table;
  }
};

inline Config load_config(const std::string& path) {
  const json doc = io_detail::parse_json(path);
  Config cfg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "theta") cfg.theta = value.get<double>();
    else if (key == "eta0") cfg.eta0 = value.get<double>();
    else if (key == "eta_growth") cfg.eta_growth = value.get<double>();
    else if (key == "eta_cap") cfg.eta_cap = value.get<double>();
    else if (key == "delta0") cfg.delta0 = value.get<double>();
    else if (key == "delta_growth") cfg.delta_growth = value.get<double>();
    else if (key == "delta_cap") cfg.delta_cap = value.get<double>();
    else if (key == "sdp_sweeps") cfg.sdp_sweeps = value.get<int>();
    else if (key == "projection_gain") cfg.projection_gain = value.get<double>();
    else if (key == "tol_outer") cfg.tol_outer = value.get<double>();
    else if (key == "tol_inner") cfg.tol_inner = value.get<double>();
    else if (key == "constraint_tol") cfg.constraint_tol = value.get<double>();
    else if (key == "max_outer") cfg.max_outer = value.get<int>();
    else if (key == "alternation_max") cfg.alternation_max = value.get<int>();
    else if (key == "alternation_tol") cfg.alternation_tol = value.get<double>();
    else if (key == "camera_tol") cfg.camera_tol = value.get<double>();
    else if (key == "camera_max_iterations")
      cfg.camera_max_iterations = value.get<int>();
    else if (key == "proportions_path")
      cfg.proportions_path = value.get<std::string>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else throw ParseError(path + ": unknown config key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

inline void save_config(const std::string& path, const Config& cfg) {
  json doc;
  doc["theta"] = cfg.theta;
  doc["eta0"] = cfg.eta0;
  doc["eta_growth"] = cfg.eta_growth;
  doc["eta_cap"] = cfg.eta_cap;
  doc["delta0"] = cfg.delta0;
  doc["delta_growth"] = cfg.delta_growth;
  doc["delta_cap"] = cfg.delta_cap;
  doc["sdp_sweeps"] = cfg.sdp_sweeps;
  doc["projection_gain"] = cfg.projection_gain;
  doc["tol_outer"] = cfg.tol_outer;
  doc["tol_inner"] = cfg.tol_inner;
  doc["constraint_tol"] = cfg.constraint_tol;
  doc["max_outer"] = cfg.max_outer;
  doc["alternation_max"] = cfg.alternation_max;
  doc["alternation_tol"] = cfg.alternation_tol;
  doc["camera_tol"] = cfg.camera_tol;
  doc["camera_max_iterations"] = cfg.camera_max_iterations;
  doc["proportions_path"] = cfg.proportions_path;
  doc["seed"] = cfg.seed;
  io_detail::write_file(path, doc.dump(2) + "\n");
}

// --- reports ------------------------------------------------------------------

// Runtime is deliberately not serialized: reports with a fixed seed must be
// byte-identical across runs.
inline std::string report_csv_header() {
  std::ostringstream out;
  out << "variant,instance,noise_level,angle_deg,err3d";
  for (int j = 0; j < kJointCount; ++j)
    out << ",err_" << JointSchema::names()[j];
  for (int i = 0; i < kLimbCount; ++i) out << ",pcp_" << limb_names()[i];
  out << ",pcp_overall,pixel_distance,outer_iters,inner_iters,solver_ok";
  return out.str();
}

inline void save_report_csv(const std::string& path,
                            const std::vector<EvalRecord>& records) {
  std::ostringstream out;
  out << report_csv_header() << '\n';
  for (const EvalRecord& r : records) {
    out << r.variant << ',' << r.instance << ',' << r.noise_level << ','
        << io_detail::format_double(r.angle_deg) << ','
        << io_detail::format_double(r.err3d);
    for (double e : r.joint_err) out << ',' << io_detail::format_double(e);
    for (double p : r.pcp_part) out << ',' << io_detail::format_double(p);
    out << ',' << io_detail::format_double(r.pcp_overall) << ','
        << io_detail::format_double(r.pixel_distance) << ',' << r.outer_iters
        << ',' << r.inner_iters << ',' << (r.solver_ok ? 1 : 0) << '\n';
  }
  io_detail::write_file(path, out.str());
}

inline std::vector<EvalRecord> load_report_csv(const std::string& path) {
  std::istringstream in(io_detail::read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty report");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != report_csv_header())
    throw ParseError(path + ": unexpected report header");
  std::vector<EvalRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = io_detail::split_csv_line(line);
    const std::string where = path + ":" + std::to_string(line_no);
    if (fields.size() != 5 + kJointCount + kLimbCount + 5)
      throw ParseError(where + ": wrong field count");
    EvalRecord r;
    size_t f = 0;
    r.variant = fields[f++];
    r.instance = static_cast<int>(io_detail::parse_double(fields[f++], where));
    r.noise_level =
        static_cast<int>(io_detail::parse_double(fields[f++], where));
    r.angle_deg = io_detail::parse_double(fields[f++], where);
    r.err3d = fields[f] == "nan" || fields[f] == "-nan"
                  ? std::numeric_limits<double>::quiet_NaN()
                  : io_detail::parse_double(fields[f], where);
    ++f;
    for (int j = 0; j < kJointCount; ++j)
      r.joint_err[j] = io_detail::parse_double(fields[f++], where);
    for (int i = 0; i < kLimbCount; ++i)
      r.pcp_part[i] = io_detail::parse_double(fields[f++], where);
    r.pcp_overall = io_detail::parse_double(fields[f++], where);
    r.pixel_distance = io_detail::parse_double(fields[f++], where);
    r.outer_iters = static_cast<int>(io_detail::parse_double(fields[f++], where));
    r.inner_iters = static_cast<long>(io_detail::parse_double(fields[f++], where));
    r.solver_ok = io_detail::parse_double(fields[f++], where) != 0.0;
    records.push_back(r);
  }
  return records;
}

// --- run manifest ---------------------------------------------------------------

struct RunManifest {
  std::string command;
  Config config;
  std::vector<std::pair<std::string, std::string>> input_digests;
  double total_runtime_ms = 0.0;
};

inline void save_manifest(const std::string& report_path,
                          const RunManifest& manifest) {
  json doc;
  doc["command"] = manifest.command;
  doc["tool_version"] = kToolVersion;
  doc["timestamp"] = static_cast<long long>(std::time(nullptr));
  doc["total_runtime_ms"] = manifest.total_runtime_ms;
  json inputs = json::object();
  for (const auto& [path, dig] : manifest.input_digests) inputs[path] = dig;
  doc["inputs"] = inputs;
  json cfg;
  cfg["theta"] = manifest.config.theta;
  cfg["eta0"] = manifest.config.eta0;
  cfg["eta_growth"] = manifest.config.eta_growth;
  cfg["delta0"] = manifest.config.delta0;
  cfg["delta_growth"] = manifest.config.delta_growth;
  cfg["sdp_sweeps"] = manifest.config.sdp_sweeps;
  cfg["projection_gain"] = manifest.config.projection_gain;
  cfg["max_outer"] = manifest.config.max_outer;
  cfg["alternation_max"] = manifest.config.alternation_max;
  cfg["seed"] = manifest.config.seed;
  doc["config"] = cfg;
  io_detail::write_file(report_path + ".manifest.json", doc.dump(2) + "\n");
}

inline std::string manifest_path_for(const std::string& report_path) {
  return report_path + ".manifest.json";
}

// --- SVG plots -------------------------------------------------------------------

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

// Minimal multi-series line chart; enough for error-vs-level and
// error-vs-angle figures.
inline std::string render_line_chart(const std::vector<PlotSeries>& series,
                                     const std::string& title,
                                     const std::string& x_label,
                                     const std::string& y_label) {
  const int width = 640, height = 420;
  const double left = 70, right = 610, top = 50, bottom = 370;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      if (first) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        first = false;
      } else {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, s.y[i]);
        ymax = std::max(ymax, s.y[i]);
      }
    }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  auto sx = [&](double v) {
    return left + (v - xmin) / (xmax - xmin) * (right - left);
  };
  auto sy = [&](double v) {
    return bottom - (v - ymin) / (ymax - ymin) * (bottom - top);
  };
  static const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "' viewBox='0 0 " << width << ' ' << height
      << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<text x='" << (width / 2) << "' y='24' text-anchor='middle' "
      << "font-size='16'>" << title << "</text>\n";
  svg << "<line x1='" << left << "' y1='" << bottom << "' x2='" << right
      << "' y2='" << bottom << "' stroke='black'/>\n";
  svg << "<line x1='" << left << "' y1='" << top << "' x2='" << left
      << "' y2='" << bottom << "' stroke='black'/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 4.0;
    const double yv = ymin + (ymax - ymin) * t / 4.0;
    svg << "<text x='" << sx(xv) << "' y='" << (bottom + 18)
        << "' text-anchor='middle' font-size='11'>"
        << io_detail::format_double(std::round(xv * 100) / 100) << "</text>\n";
    svg << "<text x='" << (left - 8) << "' y='" << (sy(yv) + 4)
        << "' text-anchor='end' font-size='11'>"
        << io_detail::format_double(std::round(yv * 1000) / 1000)
        << "</text>\n";
  }
  svg << "<text x='" << (width / 2) << "' y='" << (height - 10)
      << "' text-anchor='middle' font-size='13'>" << x_label << "</text>\n";
  svg << "<text x='18' y='" << ((top + bottom) / 2)
      << "' text-anchor='middle' font-size='13' transform='rotate(-90 18 "
      << ((top + bottom) / 2) << ")'>" << y_label << "</text>\n";
  for (size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % 8];
    svg << "<polyline fill='none' stroke='" << color << "' stroke-width='2' "
        << "points='";
    for (size_t i = 0; i < series[s].x.size(); ++i) {
      if (!std::isfinite(series[s].y[i])) continue;
      svg << sx(series[s].x[i]) << ',' << sy(series[s].y[i]) << ' ';
    }
    svg << "'/>\n";
    svg << "<text x='" << (right - 90) << "' y='" << (top + 16 * s + 4)
        << "' font-size='12' fill='" << color << "'>" << series[s].label
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace poselift
