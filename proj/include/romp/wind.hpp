#ifndef ROMP_WIND_HPP
#define ROMP_WIND_HPP

#include <romp/model.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace romp
{

struct WindSample
{
  Vec3 velocity;
  bool out_of_bounds = false;
};

/// Time-indexed wind on a regular vertex grid. Axes: x east, y north, z up.
/// A vector is the velocity of the air mass (a westerly blows toward +x).
///
/// Space is cut into cubes of side cube_size; inside one cube and one time
/// frame the wind is the mean of the cube's eight vertex vectors. Frames are
/// stored vertex-major with x varying fastest:
///   vertex(ix, iy, iz) = frame[(iz * ny + iy) * nx + ix].
class WindField
{
public:
  struct Dims
  {
    std::size_t nx = 2, ny = 2, nz = 2; // vertex counts, each >= 2
    friend bool operator==(Dims, Dims) = default;
  };

  WindField() : WindField({}, 1.0, {}, 1.0, {std::vector<Vec3>(8)}) {}

  WindField(Vec3 origin, double cube_size, Dims dims, double time_step, std::vector<std::vector<Vec3>> frames)
      : origin_(origin), cube_size_(cube_size), dims_(dims), time_step_(time_step), frames_(std::move(frames))
  {
    if (!(cube_size_ > 0.0) || !(time_step_ > 0.0))
      throw std::invalid_argument("WindField: cube_size and time_step must be positive");
    if (dims_.nx < 2 || dims_.ny < 2 || dims_.nz < 2)
      throw std::invalid_argument("WindField: need at least two vertices per axis");
    if (frames_.empty())
      throw std::invalid_argument("WindField: no frames");
    for (const auto &f : frames_)
      if (f.size() != vertex_count())
        throw std::invalid_argument("WindField: frame size does not match grid dims");
    build_cube_means();
  }

  /// Single-frame field with the same vector at every vertex: one cube of side
  /// extent at lo. The default box is 2000 km wide and centred on the origin.
  static WindField uniform(Vec3 wind, Vec3 lo = {-1e6, -1e6, -1e6}, double extent = 2e6)
  {
    return WindField(lo, extent, {2, 2, 2}, 10.0, {std::vector<Vec3>(8, wind)});
  }

  static WindField still() { return uniform({0, 0, 0}); }

  [[nodiscard]] WindSample wind_at(Vec3 p, double t) const noexcept
  {
    bool oob = false;
    auto cube = [&](double coord, double o, std::size_t n) {
      const double rel = (coord - o) / cube_size_;
      if (!(rel >= 0.0 && rel <= static_cast<double>(n - 1)))
        oob = true;
      return static_cast<std::size_t>(std::clamp(std::floor(rel), 0.0, static_cast<double>(n - 2)));
    };
    const std::size_t cx = cube(p.x, origin_.x, dims_.nx);
    const std::size_t cy = cube(p.y, origin_.y, dims_.ny);
    const std::size_t cz = cube(p.z, origin_.z, dims_.nz);
    const std::size_t frame = frame_index(t);
    const std::size_t c = (cz * (dims_.ny - 1) + cy) * (dims_.nx - 1) + cx;
    return {cube_means_[frame][c], oob};
  }

  [[nodiscard]] std::size_t frame_index(double t) const noexcept
  {
    if (!(t > 0.0))
      return 0;
    const double f = std::floor(t / time_step_);
    const auto last = static_cast<double>(frames_.size() - 1);
    return static_cast<std::size_t>(std::min(f, last));
  }

  [[nodiscard]] Vec3 origin() const noexcept { return origin_; }
  [[nodiscard]] double cube_size() const noexcept { return cube_size_; }
  [[nodiscard]] Dims dims() const noexcept { return dims_; }
  [[nodiscard]] double time_step() const noexcept { return time_step_; }
  [[nodiscard]] const std::vector<std::vector<Vec3>> &frames() const noexcept { return frames_; }
  [[nodiscard]] std::size_t vertex_count() const noexcept { return dims_.nx * dims_.ny * dims_.nz; }
  [[nodiscard]] std::size_t vertex_index(std::size_t ix, std::size_t iy, std::size_t iz) const noexcept
  {
    return (iz * dims_.ny + iy) * dims_.nx + ix;
  }

  friend bool operator==(const WindField &a, const WindField &b)
  {
    return a.origin_ == b.origin_ && a.cube_size_ == b.cube_size_ && a.dims_ == b.dims_ &&
           a.time_step_ == b.time_step_ && a.frames_ == b.frames_;
  }

private:
  void build_cube_means()
  {
    const std::size_t cx = dims_.nx - 1, cy = dims_.ny - 1, cz = dims_.nz - 1;
    cube_means_.assign(frames_.size(), std::vector<Vec3>(cx * cy * cz));
    for (std::size_t f = 0; f < frames_.size(); ++f)
      for (std::size_t k = 0; k < cz; ++k)
        for (std::size_t j = 0; j < cy; ++j)
          for (std::size_t i = 0; i < cx; ++i)
          {
            Vec3 sum;
            for (std::size_t dk = 0; dk < 2; ++dk)
              for (std::size_t dj = 0; dj < 2; ++dj)
                for (std::size_t di = 0; di < 2; ++di)
                  sum = sum + frames_[f][vertex_index(i + di, j + dj, k + dk)];
            cube_means_[f][(k * cy + j) * cx + i] = 0.125 * sum;
          }
  }

  Vec3 origin_;
  double cube_size_;
  Dims dims_;
  double time_step_;
  std::vector<std::vector<Vec3>> frames_;
  std::vector<std::vector<Vec3>> cube_means_;
};

} // namespace romp

#endif
