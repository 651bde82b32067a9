#include "pattern_gauge/semilinear/initial_data.hpp"

#include <cmath>
#include <random>

#include "pattern_gauge/error.hpp"

namespace pattern_gauge::semilinear {

fem::FieldVector make_initial_data(const geometry::Mesh& mesh, const InitialData& d) {
  const int n = mesh.num_vertices();
  fem::FieldVector u(n);
  const geometry::Vec2 axis(std::cos(d.angle), std::sin(d.angle));
  if (d.kind == "constant") {
    u.setConstant(d.value);
  } else if (d.kind == "step") {
    if (!(d.width > 0.0)) throw ParameterError("step: smoothing_width must be > 0");
    for (int i = 0; i < n; ++i) u[i] = std::tanh((mesh.vertices[i].dot(axis) - d.offset) / d.width);
  } else if (d.kind == "random") {
    if (!(d.amplitude >= 0.0)) throw ParameterError("random: amplitude must be >= 0");
    std::mt19937_64 rng(d.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < n; ++i) u[i] = d.value + d.amplitude * U(rng);
  } else if (d.kind == "cosine") {
    for (int i = 0; i < n; ++i) u[i] = d.amplitude * std::cos(d.wavenumber * mesh.vertices[i].dot(axis) + d.phase);
  } else {
    throw ParameterError("unknown initial data kind '" + d.kind + "' (known: constant, step, random, cosine)");
  }
  return u;
}

}  // namespace pattern_gauge::semilinear
