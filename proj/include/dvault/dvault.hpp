#pragma once

// Convenience include for the whole library.

#include "dvault/analysis.hpp"
#include "dvault/cipher.hpp"
#include "dvault/codec.hpp"
#include "dvault/errors.hpp"
#include "dvault/hash.hpp"
#include "dvault/image_io.hpp"
#include "dvault/keystore.hpp"
#include "dvault/multicloud.hpp"
#include "dvault/registry.hpp"
#include "dvault/rng.hpp"
#include "dvault/scramble.hpp"
