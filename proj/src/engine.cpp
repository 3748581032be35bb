#include "fdtdbench/engine.hpp"

namespace fdtdbench {

template class Simulation<Field1D<float>>;
template class Simulation<Field1D<double>>;
template class Simulation<Field3D<float>>;
template class Simulation<Field3D<double>>;

} // namespace fdtdbench
