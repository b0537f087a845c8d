#include "ttpricer/serialization.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

namespace ttp {

static_assert(std::endian::native == std::endian::little,
              "the TT container is little-endian; add byte swapping before "
              "building on a big-endian target");

namespace {

constexpr char kMagic[4] = {'T', 'T', 'C', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, T value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw IoError("unexpected end of tensor-train container");
  return value;
}

}  // namespace

void save_tensor_train(const TensorTrain& tt, std::ostream& os) {
  if (tt.empty()) throw StructureError("refusing to serialize an empty tensor train");
  os.write(kMagic, 4);
  write_pod(os, kVersion);
  write_pod(os, static_cast<std::uint64_t>(tt.size()));
  for (int i = 0; i < tt.size(); ++i) {
    write_pod(os, static_cast<std::uint64_t>(tt.slice(i, 0).rows()));
    write_pod(os, static_cast<std::uint64_t>(tt.local_dim(i)));
    write_pod(os, static_cast<std::uint64_t>(tt.slice(i, 0).cols()));
  }
  for (int i = 0; i < tt.size(); ++i) {
    const Eigen::Index rows = tt.slice(i, 0).rows();
    const Eigen::Index cols = tt.slice(i, 0).cols();
    for (Eigen::Index l = 0; l < rows; ++l)
      for (Eigen::Index x = 0; x < tt.local_dim(i); ++x)
        for (Eigen::Index r = 0; r < cols; ++r) {
          const Complex v = tt.slice(i, x)(l, r);
          write_pod(os, v.real());
          write_pod(os, v.imag());
        }
  }
  if (!os) throw IoError("write failure while saving tensor train");
}

void save_tensor_train(const TensorTrain& tt, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  save_tensor_train(tt, os);
}

TensorTrain load_tensor_train(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("not a tensor-train container (bad magic)");
  const auto version = read_pod<std::uint32_t>(is);
  if (version != kVersion)
    throw IoError("unsupported tensor-train container version " +
                  std::to_string(version));
  const auto count = read_pod<std::uint64_t>(is);
  if (count == 0 || count > 1'000'000)
    throw IoError("implausible core count " + std::to_string(count));

  struct Shape {
    std::uint64_t left, phys, right;
  };
  std::vector<Shape> shapes(count);
  for (auto& s : shapes) {
    s.left = read_pod<std::uint64_t>(is);
    s.phys = read_pod<std::uint64_t>(is);
    s.right = read_pod<std::uint64_t>(is);
    if (s.left == 0 || s.phys == 0 || s.right == 0)
      throw IoError("zero dimension in tensor-train container");
  }

  std::vector<Core> cores(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto& s = shapes[i];
    Core core(s.phys, Matrix(static_cast<Eigen::Index>(s.left),
                             static_cast<Eigen::Index>(s.right)));
    for (std::uint64_t l = 0; l < s.left; ++l)
      for (std::uint64_t x = 0; x < s.phys; ++x)
        for (std::uint64_t r = 0; r < s.right; ++r) {
          const double re = read_pod<double>(is);
          const double im = read_pod<double>(is);
          core[x](static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r)) =
              Complex(re, im);
        }
    cores[i] = std::move(core);
  }
  return TensorTrain(std::move(cores));  // constructor re-validates bonds
}

TensorTrain load_tensor_train(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return load_tensor_train(is);
}

}  // namespace ttp
