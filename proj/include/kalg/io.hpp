#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "kalg/algebra.hpp"
#include "kalg/verify.hpp"

namespace kalg {

/// Shortest decimal literal with 17 significant digits (%.17g); round-trips
/// any finite double bit-exactly through strtod.
std::string format_double(double v);

std::uint64_t fnv1a64(const void* data, std::size_t len);

/// Content hashes over the canonical binary serialization, as hex strings.
std::string kernel_content_id(const Kernel& k);
std::string diffop_content_id(const DiffOp& D);

// Kernel container: magic "KALGKNL1", one JSON header line
// {c, A, N, d, W_half, layout, endianness, has_beta}, then the samples as
// raw little-endian 64-bit floats (x-major, then offset, then d x d row
// major), then the optional majorant (beta array and its l1).  Round-trips
// bit-exactly.
void save_kernel_binary(const Kernel& k, const std::filesystem::path& path);
Kernel load_kernel_binary(const std::filesystem::path& path);

// JSON text variant for small kernels; floats as 17-digit decimal literals,
// also bit-exact.
void save_kernel_json(const Kernel& k, const std::filesystem::path& path);
Kernel load_kernel_json(const std::filesystem::path& path);

/// Dispatches on the file's magic bytes.
Kernel load_kernel(const std::filesystem::path& path);

// Difference operators: JSON list of {shift, coeffs} under the same header
// fields as the kernel format.
void save_diffop_json(const DiffOp& D, const std::filesystem::path& path);
DiffOp load_diffop_json(const std::filesystem::path& path);

/// True when the file looks like a difference-operator JSON document.
bool is_diffop_file(const std::filesystem::path& path);

// Certificates: JSON with a fixed key order and 17-digit decimal floats
// (byte-identical across reruns), plus a CSV summary with one row per check.
std::string certificate_to_json(const Certificate& cert);
std::string certificate_to_csv(const Certificate& cert);
Certificate certificate_from_json(const std::string& text);

void write_text_file(const std::filesystem::path& path,
                     const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace kalg
