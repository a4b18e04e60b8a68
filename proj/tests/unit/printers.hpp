#pragma once

#include <ostream>

#include "sanid/model.hpp"
#include "sanid/training.hpp"

// gtest looks these up by ADL when naming parameterized cases.
namespace sanid {

inline void PrintTo(Architecture arch, std::ostream* os) { *os << architecture_name(arch); }

inline void PrintTo(LossReduction r, std::ostream* os) {
  *os << (r == LossReduction::kSum ? "sum" : "mean");
}

}  // namespace sanid
