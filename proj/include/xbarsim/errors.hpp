#pragma once

#include <stdexcept>
#include <string>

namespace xbarsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : Error {
    using Error::Error;
};

struct TileTooLarge : Error {
    using Error::Error;
};

struct EncodingError : Error {
    using Error::Error;
};

struct ModelError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

} // namespace xbarsim
