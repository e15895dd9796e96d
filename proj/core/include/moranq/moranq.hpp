#pragma once

#include "moranq/antichain.hpp"
#include "moranq/coding.hpp"
#include "moranq/errors.hpp"
#include "moranq/geometry.hpp"
#include "moranq/gersho.hpp"
#include "moranq/measure.hpp"
#include "moranq/quantizer.hpp"
