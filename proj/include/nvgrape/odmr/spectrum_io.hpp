#pragma once

#include <iosfwd>
#include <string>

#include "nvgrape/nv/odmr.hpp"

namespace nvgrape::odmr {

// CSV with header `frequency_hz,pl`, one sample per row.
nv::OdmrSpectrum load_spectrum_csv(const std::string& path);
nv::OdmrSpectrum parse_spectrum_csv(std::istream& in, const std::string& source = "<stream>");

// Values are written with 17 significant digits so a reload is exact.
void write_spectrum_csv(const std::string& path, const nv::OdmrSpectrum& spectrum);
void write_spectrum_csv(std::ostream& out, const nv::OdmrSpectrum& spectrum);

} // namespace nvgrape::odmr
