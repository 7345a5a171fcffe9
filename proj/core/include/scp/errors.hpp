#pragma once

#include <stdexcept>
#include <string>

namespace scp {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error { public: using Error::Error; };
class ConfigurationError : public Error { public: using Error::Error; };
class BoundsError : public Error { public: using Error::Error; };
class SizeError : public Error { public: using Error::Error; };
class CapacityError : public Error { public: using Error::Error; };
class ArgumentError : public Error { public: using Error::Error; };
class LookupError : public Error { public: using Error::Error; };
class DataError : public Error { public: using Error::Error; };
class SchemaError : public Error { public: using Error::Error; };
class DegenerateVarianceError : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };

// Parse failures of on-disk formats. Each malformation has its own class so
// callers (and tests) can tell them apart.
class ParseError : public Error { public: using Error::Error; };
class MagicError : public ParseError { public: using ParseError::ParseError; };
class VersionError : public ParseError { public: using ParseError::ParseError; };
class TruncatedError : public ParseError { public: using ParseError::ParseError; };
class DimensionOverflowError : public ParseError { public: using ParseError::ParseError; };
class StructureError : public ParseError { public: using ParseError::ParseError; };

}  // namespace scp
