// Payload shapes the UI consumes. Everything here mirrors the wire docs;
// the UI never derives legality or rewards itself.
export {};
