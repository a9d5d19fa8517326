#pragma once

#include "ofb/interval.hpp"
#include "ofb/simplex.hpp"
#include "ofb/contractor.hpp"
#include "ofb/filterbank.hpp"
#include "ofb/quantcode.hpp"
#include "ofb/channel.hpp"
#include "ofb/decoder.hpp"
#include "ofb/harness.hpp"
