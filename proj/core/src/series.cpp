#include "bclf/series.hpp"

#include "bclf/errors.hpp"

namespace bclf {

SeriesMatrix SeriesMatrix::checked(Eigen::MatrixXd values) {
  if (values.rows() < 1 || values.cols() < 1)
    throw DimensionError("series must have at least one channel and one time point");
  if (!values.allFinite()) throw DomainError("series contains non-finite entries");
  return SeriesMatrix{std::move(values)};
}

InterlacedSeries interlace(const SeriesMatrix& x) {
  const int K = x.channels();
  const int T = x.length();
  InterlacedSeries out;
  out.K = K;
  out.T = T;
  out.y.resize(static_cast<Eigen::Index>(K) * T);
  for (int t = 0; t < T; ++t)
    for (int k = 0; k < K; ++k) out.y[static_cast<Eigen::Index>(t) * K + k] = x.values(k, t);
  return out;
}

SeriesMatrix deinterlace(const InterlacedSeries& y) {
  if (y.K < 1 || y.T < 1 || y.y.size() != static_cast<Eigen::Index>(y.K) * y.T)
    throw DimensionError("interlaced length does not equal K*T");
  SeriesMatrix out;
  out.values.resize(y.K, y.T);
  for (int t = 0; t < y.T; ++t)
    for (int k = 0; k < y.K; ++k) out.values(k, t) = y.y[static_cast<Eigen::Index>(t) * y.K + k];
  return out;
}

}  // namespace bclf
