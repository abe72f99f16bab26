#pragma once

#include "hypsing/error.hpp"
#include "hypsing/real.hpp"
#include "hypsing/mobius.hpp"
#include "hypsing/series.hpp"
#include "hypsing/germ.hpp"
#include "hypsing/schwarzian.hpp"
#include "hypsing/frobenius.hpp"
#include "hypsing/metric.hpp"
#include "hypsing/normalform.hpp"
