// Bridge client: one injectable transport, per-slot request sequencing so a
// slow response never overwrites a newer one.

import type { BridgeRequest, BridgeResponse } from './types.js';

export type Transport = (request: BridgeRequest) => Promise<BridgeResponse>;

export function fetchTransport(baseUrl = ''): Transport {
  return async (request) => {
    const response = await fetch(`${baseUrl}/api`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(request),
    });
    return (await response.json()) as BridgeResponse;
  };
}

export class BridgeClient {
  private sequence = new Map<string, number>();

  constructor(private transport: Transport) {}

  /** Send a request under a slot name; resolves null when a newer request
   *  for the same slot was issued meanwhile (stale response discarded). */
  async call<P>(slot: string, request: BridgeRequest): Promise<BridgeResponse<P> | null> {
    const ticket = (this.sequence.get(slot) ?? 0) + 1;
    this.sequence.set(slot, ticket);
    const response = (await this.transport(request)) as BridgeResponse<P>;
    if (this.sequence.get(slot) !== ticket) return null;
    return response;
  }
}
