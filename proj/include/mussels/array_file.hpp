#pragma once

// On-disk arrays: a JSON header (shape, dtype, order, endian, payload) next to
// a raw little-endian payload. Complex dtypes interleave real and imaginary
// parts.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mussels/forward_model.hpp"
#include "mussels/tensor.hpp"

namespace mussels {

enum class Dtype { c64, c128, f32, f64 };

std::string_view to_string(Dtype dtype);
Dtype parse_dtype(std::string_view name);  // throws FormatError
std::size_t dtype_size(Dtype dtype);
bool is_complex(Dtype dtype);

// Raw payload plus its description; values keep their stored precision.
struct Array {
  std::vector<long> shape;
  Dtype dtype = Dtype::f64;
  std::vector<std::byte> bytes;

  std::size_t element_count() const;
  std::vector<cplx> complex_values() const;  // complex dtypes only
  std::vector<double> real_values() const;   // real dtypes only

  friend bool operator==(Array const&, Array const&) = default;
};

Array make_array(std::vector<long> shape, std::span<cplx const> values);    // c128
Array make_array(std::vector<long> shape, std::span<double const> values);  // f64

// header_path names the JSON file; the payload is written beside it with the
// same stem and a .bin extension.
void save_array(std::filesystem::path const& header_path, Array const& array);
Array load_array(std::filesystem::path const& header_path);

// Typed views used by datasets and reconstructions.
Array to_array(MultishotImage const& x);  // [N, R, C]
Array to_array(KspaceData const& y);      // [N, C, R, C]
Array to_array(CoilMaps const& maps);     // [C, R, C]
Array to_array(ShotMasks const& masks);   // [N, R, C] f64 0/1
Array to_array(RealImage const& img);     // [R, C]
MultishotImage multishot_from_array(Array const& a);
KspaceData kspace_from_array(Array const& a);
CoilMaps coil_maps_from_array(Array const& a);
ShotMasks shot_masks_from_array(Array const& a);
RealImage real_image_from_array(Array const& a);

}  // namespace mussels
