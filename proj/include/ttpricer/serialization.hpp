#pragma once

#include <iosfwd>
#include <string>

#include "ttpricer/tensor_train.hpp"

namespace ttp {

// Binary tensor-train container, format version 1:
//
//   bytes 0..3   magic "TTC1"
//   u32          format version
//   u64          core count d
//   d times      u64 chi_left, u64 local_dim, u64 chi_right
//   d times      chi_left*local_dim*chi_right complex entries, each stored
//                as float64 re, float64 im, little-endian, row-major over
//                (left, physical, right) with the right bond fastest.
//
// Shapes sit together up front so a reader can size buffers before touching
// the payload.
void save_tensor_train(const TensorTrain& tt, std::ostream& os);
void save_tensor_train(const TensorTrain& tt, const std::string& path);

TensorTrain load_tensor_train(std::istream& is);
TensorTrain load_tensor_train(const std::string& path);

}  // namespace ttp
