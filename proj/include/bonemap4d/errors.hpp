#pragma once

#include <stdexcept>
#include <string>

namespace bm4d {

// Error taxonomy shared by all modules. The CLI maps these onto exit codes
// (usage / io / validation / numeric), see tools/bonemap4d.cpp.

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValueError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Zero-length bone; carries the offending edge index when known.
struct DegenerateBone : std::runtime_error {
    explicit DegenerateBone(const std::string& msg, int edge_index = -1)
        : std::runtime_error(msg), edge(edge_index) {}
    int edge;
};

struct BehindCamera : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfFrame : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace bm4d
