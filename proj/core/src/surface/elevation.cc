#include "roadrecon/surface/elevation.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "roadrecon/errors.h"
#include "roadrecon/util/rng.h"
#include "json.hpp"

namespace roadrecon {

Eigen::MatrixXf ElevationField::Encode(const Eigen::Matrix2Xd& xy) const {
  const int n = static_cast<int>(xy.cols());
  Eigen::MatrixXf out(InputDim(), n);
  const double cx = 0.5 * (min_x + max_x), sx = std::max(0.5 * (max_x - min_x), 1e-9);
  const double cy = 0.5 * (min_y + max_y), sy = std::max(0.5 * (max_y - min_y), 1e-9);
  for (int i = 0; i < n; ++i) {
    const double u = (xy(0, i) - cx) / sx;
    const double v = (xy(1, i) - cy) / sy;
    out(0, i) = static_cast<float>(u);
    out(1, i) = static_cast<float>(v);
    double f = M_PI;
    for (int k = 0; k < frequencies; ++k, f *= 2.0) {
      out(2 + 4 * k, i) = static_cast<float>(std::sin(f * u));
      out(3 + 4 * k, i) = static_cast<float>(std::cos(f * u));
      out(4 + 4 * k, i) = static_cast<float>(std::sin(f * v));
      out(5 + 4 * k, i) = static_cast<float>(std::cos(f * v));
    }
  }
  return out;
}

Eigen::RowVectorXf ElevationField::Forward(const Eigen::MatrixXf& encoded, Eigen::MatrixXf* h1,
                                           Eigen::MatrixXf* h2) const {
  *h1 = ((w1 * encoded).colwise() + b1).array().tanh();
  *h2 = ((w2 * *h1).colwise() + b2).array().tanh();
  return ((w3 * *h2).colwise() + b3).row(0);
}

Eigen::VectorXd ElevationField::Evaluate(const Eigen::Matrix2Xd& xy) const {
  Eigen::MatrixXf h1, h2;
  const Eigen::RowVectorXf net = Forward(Encode(xy), &h1, &h2);
  Eigen::VectorXd z(xy.cols());
  for (int i = 0; i < xy.cols(); ++i) {
    z(i) = plane(0) * xy(0, i) + plane(1) * xy(1, i) + plane(2) + z_scale * static_cast<double>(net(i));
  }
  return z;
}

double ElevationField::Evaluate(double x, double y) const {
  Eigen::Matrix2Xd xy(2, 1);
  xy << x, y;
  return Evaluate(xy)(0);
}

namespace {

void CheckExtent(const std::vector<Eigen::Vector3d>& points, int min_points) {
  if (static_cast<int>(points.size()) < min_points) {
    throw DegenerateExtentError("elevation fit needs at least " + std::to_string(min_points) +
                                " points, got " + std::to_string(points.size()));
  }
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : points) mean += p.head<2>();
  mean /= static_cast<double>(points.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector2d d = p.head<2>() - mean;
    cov += d * d.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov / points.size());
  const double small = eig.eigenvalues()(0), large = eig.eigenvalues()(1);
  if (!(large > 1e-12) || small <= 1e-10 * large) {
    throw DegenerateExtentError("elevation fit points are collinear in x/y");
  }
}

struct Adam {
  explicit Adam(const Eigen::MatrixXf& shape)
      : m(Eigen::MatrixXf::Zero(shape.rows(), shape.cols())),
        v(Eigen::MatrixXf::Zero(shape.rows(), shape.cols())) {}
  void Step(Eigen::MatrixXf* param, const Eigen::MatrixXf& grad, double lr, int t) {
    constexpr float kBeta1 = 0.9f, kBeta2 = 0.999f, kEps = 1e-8f;
    m = kBeta1 * m + (1 - kBeta1) * grad;
    v = kBeta2 * v + (1 - kBeta2) * grad.cwiseProduct(grad);
    const float c1 = static_cast<float>(1.0 - std::pow(double{kBeta1}, t));
    const float c2 = static_cast<float>(1.0 - std::pow(double{kBeta2}, t));
    param->array() -= static_cast<float>(lr) * (m.array() / c1) / ((v.array() / c2).sqrt() + kEps);
  }
  Eigen::MatrixXf m, v;
};

struct Trainer {
  Trainer(ElevationField* f)
      : field(f),
        aw1(f->w1), aw2(f->w2), aw3(f->w3),
        ab1(f->b1), ab2(f->b2), ab3(f->b3) {}

  // One Adam step on the batch (encoded inputs, normalized targets).
  void Step(const Eigen::MatrixXf& x, const Eigen::RowVectorXf& target, double lr) {
    ++t;
    Eigen::MatrixXf h1, h2;
    const Eigen::RowVectorXf y = field->Forward(x, &h1, &h2);
    const float n = static_cast<float>(x.cols());
    const Eigen::RowVectorXf dy = 2.0f * (y - target) / n;
    const Eigen::MatrixXf gw3 = dy * h2.transpose();
    const Eigen::VectorXf gb3 = Eigen::VectorXf::Constant(1, dy.sum());
    const Eigen::MatrixXf dh2 =
        (field->w3.transpose() * dy).cwiseProduct((1.0f - h2.array().square()).matrix());
    const Eigen::MatrixXf gw2 = dh2 * h1.transpose();
    const Eigen::VectorXf gb2 = dh2.rowwise().sum();
    const Eigen::MatrixXf dh1 =
        (field->w2.transpose() * dh2).cwiseProduct((1.0f - h1.array().square()).matrix());
    const Eigen::MatrixXf gw1 = dh1 * x.transpose();
    const Eigen::VectorXf gb1 = dh1.rowwise().sum();
    aw1.Step(&field->w1, gw1, lr, t);
    aw2.Step(&field->w2, gw2, lr, t);
    aw3.Step(&field->w3, gw3, lr, t);
    Eigen::MatrixXf b;
    b = field->b1; ab1.Step(&b, gb1, lr, t); field->b1 = b;
    b = field->b2; ab2.Step(&b, gb2, lr, t); field->b2 = b;
    b = field->b3; ab3.Step(&b, gb3, lr, t); field->b3 = b;
  }

  ElevationField* field;
  Adam aw1, aw2, aw3, ab1, ab2, ab3;
  int t = 0;
};

// Residual targets in network units.
Eigen::RowVectorXf Targets(const ElevationField& f, const std::vector<Eigen::Vector3d>& points) {
  Eigen::RowVectorXf t(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    t(i) = static_cast<float>((p.z() - (f.plane(0) * p.x() + f.plane(1) * p.y() + f.plane(2))) /
                              f.z_scale);
  }
  return t;
}

Eigen::Matrix2Xd Xy(const std::vector<Eigen::Vector3d>& points) {
  Eigen::Matrix2Xd xy(2, points.size());
  for (size_t i = 0; i < points.size(); ++i) xy.col(i) = points[i].head<2>();
  return xy;
}

void Train(ElevationField* field, const Eigen::MatrixXf& encoded, const Eigen::RowVectorXf& target,
           int iterations, double lr0, double lr1, int batch_size, uint64_t seed) {
  Trainer trainer(field);
  Rng rng(seed);
  const int n = static_cast<int>(encoded.cols());
  const int batch = std::min(batch_size, n);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  int cursor = n;
  Eigen::MatrixXf x(encoded.rows(), batch);
  Eigen::RowVectorXf t(batch);
  for (int it = 0; it < iterations; ++it) {
    // Reshuffled epochs (Fisher-Yates with the deterministic generator).
    if (batch == n) {
      x = encoded;
      t = target;
    } else {
      for (int b = 0; b < batch; ++b) {
        if (cursor >= n) {
          for (int i = n - 1; i > 0; --i) {
            std::swap(order[i], order[rng.UniformIndex(static_cast<uint64_t>(i) + 1)]);
          }
          cursor = 0;
        }
        x.col(b) = encoded.col(order[cursor]);
        t(b) = target(order[cursor]);
        ++cursor;
      }
    }
    const double frac = iterations > 1 ? static_cast<double>(it) / (iterations - 1) : 1.0;
    const double lr = lr0 * std::pow(lr1 / lr0, frac);  // geometric decay
    trainer.Step(x, t, lr);
  }
}

double Mse(const ElevationField& field, const std::vector<Eigen::Vector3d>& points) {
  const Eigen::VectorXd z = field.Evaluate(Xy(points));
  double sum = 0.0;
  for (size_t i = 0; i < points.size(); ++i) sum += std::pow(z(i) - points[i].z(), 2);
  return sum / static_cast<double>(points.size());
}

}  // namespace

ElevationField FitElevation(const std::vector<Eigen::Vector3d>& points,
                            const ElevationConfig& config) {
  CheckExtent(points, config.min_points);
  ElevationField f;
  f.frequencies = config.frequencies;
  f.min_x = f.max_x = points[0].x();
  f.min_y = f.max_y = points[0].y();
  for (const auto& p : points) {
    f.min_x = std::min(f.min_x, p.x());
    f.max_x = std::max(f.max_x, p.x());
    f.min_y = std::min(f.min_y, p.y());
    f.max_y = std::max(f.max_y, p.y());
  }
  f.min_x -= config.bounds_margin;
  f.max_x += config.bounds_margin;
  f.min_y -= config.bounds_margin;
  f.max_y += config.bounds_margin;

  const int n = static_cast<int>(points.size());
  if (config.fit_plane) {
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
      A.row(i) << points[i].x(), points[i].y(), 1.0;
      b(i) = points[i].z();
    }
    f.plane = A.colPivHouseholderQr().solve(b);
  } else {
    double mean = 0.0;
    for (const auto& p : points) mean += p.z();
    f.plane = Eigen::Vector3d(0, 0, mean / n);
  }
  double var = 0.0;
  for (const auto& p : points) {
    var += std::pow(p.z() - (f.plane(0) * p.x() + f.plane(1) * p.y() + f.plane(2)), 2);
  }
  f.z_scale = std::max(std::sqrt(var / n), 1e-2);

  // Glorot-uniform weights, zero biases.
  Rng rng(MixSeed(config.seed, 1));
  auto glorot = [&](int rows, int cols) {
    const double limit = std::sqrt(6.0 / (rows + cols));
    Eigen::MatrixXf m(rows, cols);
    for (int c = 0; c < cols; ++c) {
      for (int r = 0; r < rows; ++r) m(r, c) = static_cast<float>(rng.Uniform(-limit, limit));
    }
    return m;
  };
  const int h = config.hidden;
  f.w1 = glorot(h, f.InputDim());
  f.w2 = glorot(h, h);
  f.w3 = glorot(1, h);
  f.b1 = Eigen::VectorXf::Zero(h);
  f.b2 = Eigen::VectorXf::Zero(h);
  f.b3 = Eigen::VectorXf::Zero(1);

  f.initial_loss = Mse(f, points);
  const Eigen::MatrixXf encoded = f.Encode(Xy(points));
  Train(&f, encoded, Targets(f, points), config.iterations, config.learning_rate,
        config.final_learning_rate, config.batch_size, MixSeed(config.seed, 2));
  f.final_loss = Mse(f, points);
  return f;
}

ElevationField FitElevation(const std::vector<SemanticPoint>& points,
                            const ElevationConfig& config) {
  std::vector<Eigen::Vector3d> xyz;
  xyz.reserve(points.size());
  for (const auto& p : points) xyz.push_back(p.position);
  return FitElevation(xyz, config);
}

void RefineElevation(ElevationField* field, const std::vector<Eigen::Vector3d>& points,
                     int iterations, const ElevationConfig& config) {
  if (points.empty() || iterations <= 0) return;
  const Eigen::MatrixXf encoded = field->Encode(Xy(points));
  Train(field, encoded, Targets(*field, points), iterations, config.final_learning_rate,
        config.final_learning_rate, config.batch_size, MixSeed(config.seed, 3));
  field->final_loss = Mse(*field, points);
}

double FieldRmse(const ElevationField& field, const std::vector<Eigen::Vector3d>& points) {
  return points.empty() ? 0.0 : std::sqrt(Mse(field, points));
}

namespace {

using nlohmann::ordered_json;

ordered_json MatrixJson(const Eigen::MatrixXf& m) {
  // Row-major nested arrays; floats widen to double exactly.
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(static_cast<double>(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXf MatrixFromJson(const ordered_json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string("elevation field: ") + what + " is not an array");
  const int rows = static_cast<int>(j.size());
  const int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
  Eigen::MatrixXf m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols) {
      throw ParseError(std::string("elevation field: ragged ") + what);
    }
    for (int c = 0; c < cols; ++c) m(r, c) = static_cast<float>(j[r][c].get<double>());
  }
  return m;
}

ordered_json VectorJson(const Eigen::VectorXf& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(static_cast<double>(v[i]));
  return a;
}

Eigen::VectorXf VectorFromJson(const ordered_json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string("elevation field: ") + what + " is not an array");
  Eigen::VectorXf v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = static_cast<float>(j[i].get<double>());
  return v;
}

}  // namespace

std::string ElevationFieldToJson(const ElevationField& f) {
  ordered_json j;
  j["frequencies"] = f.frequencies;
  j["bounds"] = {f.min_x, f.max_x, f.min_y, f.max_y};
  j["plane"] = {f.plane.x(), f.plane.y(), f.plane.z()};
  j["z_scale"] = f.z_scale;
  j["initial_loss"] = f.initial_loss;
  j["final_loss"] = f.final_loss;
  j["w1"] = MatrixJson(f.w1);
  j["b1"] = VectorJson(f.b1);
  j["w2"] = MatrixJson(f.w2);
  j["b2"] = VectorJson(f.b2);
  j["w3"] = MatrixJson(f.w3);
  j["b3"] = VectorJson(f.b3);
  return j.dump();
}

ElevationField ElevationFieldFromJson(const std::string& text) {
  ElevationField f;
  try {
    const ordered_json j = ordered_json::parse(text);
    f.frequencies = j.at("frequencies").get<int>();
    const auto& b = j.at("bounds");
    f.min_x = b.at(0).get<double>();
    f.max_x = b.at(1).get<double>();
    f.min_y = b.at(2).get<double>();
    f.max_y = b.at(3).get<double>();
    const auto& p = j.at("plane");
    f.plane = Eigen::Vector3d(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
    f.z_scale = j.at("z_scale").get<double>();
    f.initial_loss = j.at("initial_loss").get<double>();
    f.final_loss = j.at("final_loss").get<double>();
    f.w1 = MatrixFromJson(j.at("w1"), "w1");
    f.b1 = VectorFromJson(j.at("b1"), "b1");
    f.w2 = MatrixFromJson(j.at("w2"), "w2");
    f.b2 = VectorFromJson(j.at("b2"), "b2");
    f.w3 = MatrixFromJson(j.at("w3"), "w3");
    f.b3 = VectorFromJson(j.at("b3"), "b3");
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("elevation field: ") + e.what());
  }
  const int hidden = static_cast<int>(f.b1.size());
  if (f.frequencies < 0 || f.w1.rows() != hidden || f.w1.cols() != f.InputDim() ||
      f.w2.rows() != f.b2.size() || f.w2.cols() != hidden || f.w3.rows() != 1 ||
      f.w3.cols() != f.b2.size() || f.b3.size() != 1) {
    throw ParseError("elevation field: inconsistent layer shapes");
  }
  return f;
}

}  // namespace roadrecon
