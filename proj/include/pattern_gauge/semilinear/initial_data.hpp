#pragma once

#include <cstdint>
#include <string>

#include "pattern_gauge/fem/assembly.hpp"
#include "pattern_gauge/geometry/mesh.hpp"

namespace pattern_gauge::semilinear {

// Descriptor for initial data or supplied states.
//   constant(c)
//   step(axis, smoothing_width):  tanh((x . axis - offset) / smoothing_width), axis "x", "y" or an angle
//   random(seed, amplitude, around): around + amplitude * U(-1, 1) per vertex
//   cosine(axis, k, amplitude, phase): amplitude * cos(k (x . axis) + phase)
struct InitialData {
  std::string kind = "constant";
  double value = 0.0;          // constant c, or random "around"
  double angle = 0.0;          // axis direction in radians (x axis = 0)
  double width = 0.1;          // step smoothing width
  double offset = 0.0;         // step location along the axis
  double amplitude = 1.0;
  double wavenumber = 1.0;
  double phase = 0.0;
  std::uint64_t seed = 1;
};

fem::FieldVector make_initial_data(const geometry::Mesh& mesh, const InitialData& desc);

}  // namespace pattern_gauge::semilinear
