#pragma once

// Text form of descriptors:
//
//   scalar
//   lp(p=<number|inf>, dim=<n>)
//   psum(p=<number|inf>, [<child>, <child>, ...])
//
// with an optional trailing `field=real|complex` argument on the root node.
// Numbers are read with from_chars and written in shortest round-trip form,
// so parse(serialize(d)) == d for every descriptor.

#include <string>
#include <string_view>

#include "numidx/space.hpp"

namespace numidx {

/// Throws ParseError naming the offending element.
SpaceDescriptor parse_descriptor(std::string_view text);

std::string serialize_descriptor(const SpaceDescriptor& space);

/// Shortest decimal form that reads back to the same double ("inf" for +inf).
std::string format_double(double value);

}  // namespace numidx
