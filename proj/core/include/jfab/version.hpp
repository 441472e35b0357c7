#pragma once

namespace jfab {

inline constexpr const char* kVersion = "0.1.0";

// Major version of the dataset CSV schema. Readers reject files whose
// declared major version exceeds this.
inline constexpr int kDatasetSchemaMajor = 1;
inline constexpr int kDatasetSchemaMinor = 0;

}  // namespace jfab
