#ifndef BCLF_SERIES_HPP
#define BCLF_SERIES_HPP

#include <Eigen/Dense>

namespace bclf {

/// K-channel multivariate time series, stored channel-by-time (K x T).
/// All entries must be finite.
struct SeriesMatrix {
  Eigen::MatrixXd values;  // (k, t)

  int channels() const { return static_cast<int>(values.rows()); }
  int length() const { return static_cast<int>(values.cols()); }

  /// Validates shape and finiteness; throws DimensionError / DomainError.
  static SeriesMatrix checked(Eigen::MatrixXd values);
};

/// The scalar series obtained by stacking channels one time step at a time:
/// position t*K + k (0-based) holds channel k at time t.
struct InterlacedSeries {
  Eigen::VectorXd y;  // length K*T
  int K = 0;
  int T = 0;

  int channel_of(Eigen::Index n) const { return static_cast<int>(n % K); }
  int time_of(Eigen::Index n) const { return static_cast<int>(n / K); }
  Eigen::Index position(int k, int t) const {
    return static_cast<Eigen::Index>(t) * K + k;
  }
};

InterlacedSeries interlace(const SeriesMatrix& x);
SeriesMatrix deinterlace(const InterlacedSeries& y);

}  // namespace bclf

#endif  // BCLF_SERIES_HPP
