#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "roadrecon/surface/semantics.h"

namespace roadrecon {

struct ElevationConfig {
  int frequencies = 6;  // L: sin/cos pairs per axis
  int hidden = 64;
  int iterations = 3000;
  int batch_size = 512;
  double learning_rate = 3e-3;
  double final_learning_rate = 3e-4;
  uint64_t seed = 0;
  double bounds_margin = 1.0;  // meters added around the training extent
  // Fit a least-squares plane first and regress only the residual.
  bool fit_plane = true;
  int min_points = 10;
};

// Smooth height field z = plane(x, y) + scale * MLP(encode(u, v)), where
// (u, v) are the coordinates normalized to [-1, 1] over the bounds and the
// encoding is [u, v, sin(2^k pi u), cos(2^k pi u), sin(2^k pi v), cos(2^k pi v)]
// for k < L. The MLP has two tanh hidden layers.
class ElevationField {
 public:
  double Evaluate(double x, double y) const;
  Eigen::VectorXd Evaluate(const Eigen::Matrix2Xd& xy) const;
  bool Contains(double x, double y) const {
    return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
  }
  int InputDim() const { return 2 + 4 * frequencies; }
  Eigen::MatrixXf Encode(const Eigen::Matrix2Xd& xy) const;
  // Hidden activations and output for an encoded batch.
  Eigen::RowVectorXf Forward(const Eigen::MatrixXf& encoded, Eigen::MatrixXf* h1,
                             Eigen::MatrixXf* h2) const;

  int frequencies = 6;
  double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
  Eigen::Vector3d plane = Eigen::Vector3d::Zero();  // z = a x + b y + c
  double z_scale = 1.0;
  // Network weights are single precision; the plane and scaling are double.
  Eigen::MatrixXf w1, w2, w3;
  Eigen::VectorXf b1, b2, b3;
  // Full-batch mean squared error over the training points, meters^2.
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

// Adam regression of point heights. Throws DegenerateExtentError for fewer
// than `min_points` points or points that are collinear in x/y.
ElevationField FitElevation(const std::vector<SemanticPoint>& points,
                            const ElevationConfig& config = {});
ElevationField FitElevation(const std::vector<Eigen::Vector3d>& points,
                            const ElevationConfig& config = {});

// Continues training an existing field on `points` for `iterations` steps at
// the final learning rate; bounds and normalization are unchanged.
void RefineElevation(ElevationField* field, const std::vector<Eigen::Vector3d>& points,
                     int iterations, const ElevationConfig& config = {});

double FieldRmse(const ElevationField& field, const std::vector<Eigen::Vector3d>& points);

// Lossless JSON form of a trained field. FromJson throws ParseError.
std::string ElevationFieldToJson(const ElevationField& field);
ElevationField ElevationFieldFromJson(const std::string& text);

}  // namespace roadrecon
