#pragma once

#include "errdens/sample.hpp"

#include <string>

namespace errdens {

//! Loads a sample from CSV with header "x1,...,xd,y" (d inferred from the
//! header). Throws MalformedCsv with a 1-based row/column location for bad
//! headers, ragged rows, non-numeric or non-finite cells; EmptyFile for an
//! empty file; Io when the file cannot be opened.
Sample load_sample(const std::string& path);

//! Writes a sample in the load_sample format with round-trippable numbers.
void write_sample(const std::string& path, const Sample& sample);

//! Round-trippable formatting used for every number we serialize
//! (17 significant digits).
std::string format_double(double value);

} // namespace errdens
