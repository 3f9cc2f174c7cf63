#pragma once

#include "heron/errors.hpp"
#include "heron/numtheory.hpp"
#include "heron/polynomial.hpp"
#include "heron/curve.hpp"
#include "heron/heron_family.hpp"
#include "heron/torsion.hpp"
#include "heron/descent.hpp"
#include "heron/sieve.hpp"
#include "heron/scan.hpp"
