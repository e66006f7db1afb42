#pragma once

#include <string>
#include <string_view>

#include "dxi/funceq.hpp"

namespace dxi {

// One JSON object per report; complex values are [re, im] pairs and
// non-finite reals are written as the strings "nan", "inf", "-inf".
std::string report_to_json(const VerificationReport& r, int indent = -1);
// Inverse of report_to_json (throws ErrorCode::Parse).
VerificationReport report_from_json(std::string_view text);

// "id,params_hash,abs_residual,rel_residual,pass"
std::string report_csv_header();
std::string report_csv_row(const VerificationReport& r);

// FNV-1a (64 bit) of the canonical parameter JSON, as 16 hex digits.
std::string params_hash(const VerificationRequest& req);

// %.17g, with nan/inf spelled out.
std::string format_real(double v);

}  // namespace dxi
