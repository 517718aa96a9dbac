import assert from "node:assert/strict";
import { test } from "node:test";

import { pythonRepr } from "../src/pyfloat.js";

// [expected Python repr, big-endian IEEE-754 hex of the double]
const REFERENCE: Array<[string, string]> = [
  ["0.0", "0000000000000000"],
  ["-0.0", "8000000000000000"],
  ["1.0", "3ff0000000000000"],
  ["-1.0", "bff0000000000000"],
  ["0.1", "3fb999999999999a"],
  ["0.5", "3fe0000000000000"],
  ["0.6666666666666666", "3fe5555555555555"],
  ["100.0", "4059000000000000"],
  ["1000000000000000.0", "430c6bf526340000"],
  ["1234567890123456.0", "43118b54f22aeb00"],
  ["1.2345678901234568e+16", "4345ee2a2eb5a5c4"],
  ["1e+16", "4341c37937e08000"],
  ["1.5e+16", "434aa535d3d0c000"],
  ["0.0001", "3f1a36e2eb1c432d"],
  ["1e-05", "3ee4f8b588e368f1"],
  ["2.5e-07", "3e90c6f7a0b5ed8d"],
  ["-2.5e-07", "be90c6f7a0b5ed8d"],
  ["3.141592653589793", "400921fb54442d18"],
  ["2.718281828459045", "4005bf0a8b145769"],
  ["1e+21", "444b1ae4d6e2ef50"],
  ["5e-324", "0000000000000001"],
  ["1.7976931348623157e+308", "7fefffffffffffff"],
  ["123456.78901234567", "40fe240c9fcb68cd"],
  ["-0.007", "bf7cac083126e979"],
  ["42.0", "4045000000000000"],
  ["0.30000000000000004", "3fd3333333333334"],
  ["1e+100", "54b249ad2594c37d"],
  ["1e-100", "2b2bff2ee48e0530"],
  ["65536.0", "40f0000000000000"],
  ["0.3333333333333333", "3fd5555555555555"],
  ["9.999999999999998e-05", "3f1a36e2eb1c432b"],
  ["1.989032661366619e+244", "72a74de452e6b438"],
  ["3.8805588161425205e+178", "6503270e269e0d37"],
  ["1.9902491793487935e-249", "0c4c7fd0a6a3a450"],
  ["7.716417708670279e+87", "522f0824128b2f33"],
  ["6.823792259378784e-193", "1808e811892f902b"],
  ["6.850567808936544e-207", "1521985d5d9dc9f8"],
  ["1.7160537630466207e+197", "68e25d940ed90475"],
  ["3.147337620597693e-44", "36e675cc81e74ef5"],
  ["1.0613447212142254e-202", "1600a35a099950d8"],
  ["4.708325160387546e+207", "6b0d549b6f03675a"],
  ["3.1935080792567816e-12", "3d8c172411e20b8f"],
  ["4.986565189284367e-246", "0d016ece1738f7d9"],
];

function fromHex(hex: string): number {
  const buf = Buffer.from(hex, "hex");
  return buf.readDoubleBE(0);
}

test("matches CPython repr on the reference table", () => {
  for (const [expected, hex] of REFERENCE) {
    assert.equal(pythonRepr(fromHex(hex)), expected, `for bits ${hex}`);
  }
});

test("round-trips through Number parsing", () => {
  for (const [, hex] of REFERENCE) {
    const value = fromHex(hex);
    assert.ok(Object.is(Number(pythonRepr(value)), value), `for bits ${hex}`);
  }
});

test("rejects non-finite values", () => {
  for (const bad of [Infinity, -Infinity, NaN]) {
    assert.throws(() => pythonRepr(bad));
  }
});

test("random doubles round-trip and match formatting invariants", () => {
  // deterministic xorshift so the sweep is reproducible
  let state = 0x9e3779b97f4a7c15n;
  const next = () => {
    state ^= state << 13n;
    state ^= state >> 7n;
    state ^= state << 17n;
    state &= 0xffffffffffffffffn;
    return state;
  };
  const buf = Buffer.alloc(8);
  for (let i = 0; i < 5000; i++) {
    buf.writeBigUInt64BE(next() & 0x7fefffffffffffffn); // finite, positive exponent space
    const value = buf.readDoubleBE(0);
    if (!Number.isFinite(value)) {
      continue;
    }
    const repr = pythonRepr(value);
    assert.ok(Object.is(Number(repr), value), `round trip for ${repr}`);
    if (repr.includes("e")) {
      const exp = parseInt(repr.split("e")[1], 10);
      assert.ok(exp >= 16 || exp < -4, `exponent form only outside [-4, 16): ${repr}`);
      assert.match(repr, /e[+-]\d{2,}$/, `two-digit exponent: ${repr}`);
    } else {
      assert.ok(repr.includes("."), `positional form carries a dot: ${repr}`);
    }
  }
});
